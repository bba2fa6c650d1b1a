#include "frogld/bm/backward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include <boost/math/quadrature/gauss.hpp>

#include "frogld/bm/hitting.hpp"
#include "frogld/core/error.hpp"
#include "frogld/simd/kernels.hpp"

namespace frogld {

namespace {

struct GaussRule {
    std::vector<double> x;  // on [-1,1]
    std::vector<double> w;
};

template <unsigned N>
GaussRule make_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    GaussRule r;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] == 0.0) continue;
        r.x.push_back(-a[i]);
        r.w.push_back(w[i]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        r.x.push_back(a[i]);
        r.w.push_back(w[i]);
    }
    return r;
}

const GaussRule& rule15() {
    static const GaussRule r = make_rule<15>();
    return r;
}
const GaussRule& rule20() {
    static const GaussRule r = make_rule<20>();
    return r;
}

std::vector<double> graded_mesh(double a, double b, double dmin_a, double dmin_b, double ratio, int refine) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<double> br{a, mid, b};
    for (double d = dmin_a; d < 0.7 * half; d *= ratio) br.push_back(a + d);
    for (double d = dmin_b; d < 0.7 * half; d *= ratio) br.push_back(b - d);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    if (refine <= 1) return br;
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < br.size(); ++i)
        for (int k = 0; k < refine; ++k) out.push_back(br[i] + (br[i + 1] - br[i]) * k / refine);
    out.push_back(br.back());
    return out;
}

class SlabStepper {
public:
    SlabStepper(const BackwardSlab& s, const PanelFunction& next, const BackwardOptions& opt)
        : s_(s), next_(next), opt_(opt), a_(s.lower), b_(s.upper), L_(s.upper - s.lower),
          sigma_(std::sqrt(s.duration)), image_sum_(simd::image_sum_fn(simd::active_level())) {
        check_invariant(std::isfinite(a_) && std::isfinite(b_) && L_ > 0, "backward slab must be closed");
        eigen_ = sigma_ >= L_ / 8.0;
        if (eigen_) project_modes();
    }

    double value(double z) {
        if (!(z > a_ && z < b_)) return 0.0;
        if (eigen_) return eigen_value(z);
        if (next_.is_one()) return two_barrier_images(a_, b_, z, s_.duration);
        return image_value(z);
    }

private:
    void project_modes() {
        const int extra = opt_.refine > 1 ? 8 : 0;
        modes_ = static_cast<int>(std::ceil(std::sqrt(80.0) / M_PI * L_ / sigma_)) + 2 + extra;
        gamma_.assign(modes_ + 1, 0.0);
        for (int k = 1; k <= modes_; ++k) decay_.push_back(std::exp(-k * k * M_PI * M_PI * s_.duration / (2 * L_ * L_)));
        decay_.insert(decay_.begin(), 0.0);
        if (next_.is_one()) {
            for (int k = 1; k <= modes_; k += 2) gamma_[k] = 4.0 / (k * M_PI);
            return;
        }
        std::vector<double> edges{a_, b_};
        for (double x : next_.breaks())
            if (x > a_ && x < b_) edges.push_back(x);
        std::sort(edges.begin(), edges.end());
        const double maxlen = L_ / (16.0 * opt_.refine);
        const auto& g = rule20();
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const double lo = edges[i], hi = edges[i + 1];
            const int parts = std::max(1, static_cast<int>(std::ceil((hi - lo) / maxlen)));
            for (int p = 0; p < parts; ++p) {
                const double x0 = lo + (hi - lo) * p / parts, x1 = lo + (hi - lo) * (p + 1) / parts;
                const double c = 0.5 * (x0 + x1), h = 0.5 * (x1 - x0);
                for (std::size_t n = 0; n < g.x.size(); ++n) {
                    const double w = c + h * g.x[n];
                    const double f = next_(w) * g.w[n] * h * 2.0 / L_;
                    if (f == 0.0) continue;
                    const double th = M_PI * (w - a_) / L_;
                    for (int k = 1; k <= modes_; ++k) gamma_[k] += f * std::sin(k * th);
                }
            }
        }
    }

    double eigen_value(double z) const {
        const double th = M_PI * (z - a_) / L_;
        double v = 0.0;
        for (int k = 1; k <= modes_; ++k) v += gamma_[k] * decay_[k] * std::sin(k * th);
        return std::max(0.0, v);
    }

    double image_value(double z) {
        static const double offs[] = {0.5, 1, 2, 3, 4, 6, 8, 10, 12};
        const double w_lo = std::max(a_, z - 12 * sigma_), w_hi = std::min(b_, z + 12 * sigma_);
        edges_.clear();
        edges_.push_back(w_lo);
        edges_.push_back(w_hi);
        edges_.push_back(z);
        for (double o : offs) {
            for (double e : {z - o * sigma_, z + o * sigma_})
                if (e > w_lo && e < w_hi) edges_.push_back(e);
        }
        const auto& nb = next_.breaks();
        for (auto it = std::upper_bound(nb.begin(), nb.end(), w_lo); it != nb.end() && *it < w_hi; ++it)
            edges_.push_back(*it);
        std::sort(edges_.begin(), edges_.end());
        const bool pair_a = (z - a_) <= (b_ - z);
        const double p = pair_a ? z - a_ : b_ - z;
        const auto& g = rule15();
        q_.clear();
        v_.clear();
        for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
            const double lo = edges_[i], hi = edges_[i + 1];
            if (!(hi > lo)) continue;
            for (int r = 0; r < opt_.refine; ++r) {
                const double x0 = lo + (hi - lo) * r / opt_.refine, x1 = lo + (hi - lo) * (r + 1) / opt_.refine;
                const double c = 0.5 * (x0 + x1), h = 0.5 * (x1 - x0);
                for (std::size_t n = 0; n < g.x.size(); ++n) {
                    const double w = c + h * g.x[n];
                    const double f = next_(w);
                    if (f == 0.0) continue;
                    q_.push_back(pair_a ? w - a_ : b_ - w);
                    v_.push_back(f * g.w[n] * h);
                }
            }
        }
        const double v = image_sum_(q_.data(), v_.data(), q_.size(), p, L_, sigma_);
        return std::max(0.0, v);
    }

    const BackwardSlab& s_;
    const PanelFunction& next_;
    const BackwardOptions& opt_;
    double a_, b_, L_, sigma_;
    simd::ImageSumFn image_sum_;
    bool eigen_ = false;
    int modes_ = 0;
    std::vector<double> gamma_, decay_;
    std::vector<double> edges_, q_, v_;
};

}  // namespace

PanelFunction PanelFunction::one() {
    PanelFunction f;
    f.one_ = true;
    return f;
}

PanelFunction::PanelFunction(std::vector<double> breaks, int q, std::vector<double> values)
    : breaks_(std::move(breaks)), q_(q), values_(std::move(values)) {
    check_invariant(breaks_.size() >= 2 && q_ >= 2, "panel function needs at least one panel");
    check_invariant(values_.size() == (breaks_.size() - 1) * static_cast<std::size_t>(q_), "panel value count");
}

const std::vector<double>& PanelFunction::cheb_nodes(int q) {
    static std::mutex mu;
    static std::map<int, std::vector<double>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto& v = cache[q];
    if (v.empty()) {
        for (int k = 0; k < q; ++k) v.push_back(std::cos(M_PI * k / (q - 1)));
        v.front() = 1.0;
        v.back() = -1.0;
    }
    return v;
}

double PanelFunction::operator()(double x) const {
    if (one_) return 1.0;
    if (!(x > breaks_.front() && x < breaks_.back())) return 0.0;
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::size_t p = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    if (p >= breaks_.size() - 1) p = breaks_.size() - 2;
    const double x0 = breaks_[p], x1 = breaks_[p + 1];
    const double t = (2.0 * x - x0 - x1) / (x1 - x0);
    const double* v = values_.data() + p * q_;
    thread_local std::vector<double> nodes;
    thread_local int nodes_q = 0;
    if (nodes_q != q_) {
        nodes = cheb_nodes(q_);
        nodes_q = q_;
    }
    double num = 0.0, den = 0.0;
    for (int k = 0; k < q_; ++k) {
        const double d = t - nodes[k];
        if (d == 0.0) return v[k];
        double w = (k & 1) ? -1.0 : 1.0;
        if (k == 0 || k == q_ - 1) w *= 0.5;
        w /= d;
        num += w * v[k];
        den += w;
    }
    return num / den;
}

std::vector<PanelFunction> solve_backward(const std::vector<BackwardSlab>& slabs, const BackwardOptions& opt) {
    std::vector<PanelFunction> out(slabs.size(), PanelFunction::one());
    PanelFunction next = PanelFunction::one();
    const auto& nodes = PanelFunction::cheb_nodes(opt.q);
    for (std::size_t j = slabs.size(); j-- > 0;) {
        const auto& s = slabs[j];
        check_invariant(s.duration > 0, "backward slab with nonpositive duration");
        const double sigma = std::sqrt(s.duration);
        const double fine = sigma / 256.0, coarse = sigma / 16.0;
        const auto br = graded_mesh(s.lower, s.upper, s.lower_real ? fine : coarse, s.upper_real ? fine : coarse,
                                    opt.ratio, opt.refine);
        SlabStepper step(s, next, opt);
        std::vector<double> vals;
        vals.reserve((br.size() - 1) * opt.q);
        for (std::size_t p = 0; p + 1 < br.size(); ++p) {
            const double c = 0.5 * (br[p] + br[p + 1]), h = 0.5 * (br[p + 1] - br[p]);
            for (int k = 0; k < opt.q; ++k) {
                double z = c + h * nodes[k];
                if (k == 0) z = br[p + 1];
                if (k == opt.q - 1) z = br[p];
                vals.push_back(step.value(z));
            }
        }
        out[j] = PanelFunction(br, opt.q, std::move(vals));
        next = out[j];
    }
    return out;
}

std::vector<BackwardSlab> close_corridors(const std::vector<double>& durations, const std::vector<double>& lowers,
                                          const std::vector<double>& uppers, double roi_lo, double roi_hi) {
    check_invariant(durations.size() == lowers.size() && durations.size() == uppers.size(), "closure sizes");
    double total = 0.0, lo = roi_lo, hi = roi_hi;
    for (std::size_t i = 0; i < durations.size(); ++i) {
        total += durations[i];
        for (double v : {lowers[i], uppers[i]}) {
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double far = 10.0 * std::sqrt(total) + 1e-9 * std::max(1.0, hi - lo);
    std::vector<BackwardSlab> out;
    for (std::size_t i = 0; i < durations.size(); ++i) {
        BackwardSlab s{durations[i], lowers[i], uppers[i], true, true};
        if (!std::isfinite(s.lower)) {
            s.lower = lo - far;
            s.lower_real = false;
        }
        if (!std::isfinite(s.upper)) {
            s.upper = hi + far;
            s.upper_real = false;
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace frogld
