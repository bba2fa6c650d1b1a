#include "frogld/energy/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "frogld/core/error.hpp"
#include "frogld/core/stats.hpp"

namespace frogld {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double upper_barrier_at(const StepProfile& g, double level) {
    for (const auto& j : g.pos())
        if (j.level > level) return j.loc;
    return kInf;
}

double lower_barrier_at(const StepProfile& g, double level) {
    for (const auto& j : g.neg())
        if (j.level > level) return j.loc;
    return -kInf;
}

CorridorSchedule theta_schedule(const StepProfile& f, double x) {
    const double c = f(x);
    CorridorSchedule s;
    s.horizon = f.xi() - c;
    if (s.horizon <= 0) return s;
    std::vector<double> lv;
    for (double l : f.levels())
        if (l > c && l < f.xi()) lv.push_back(l);
    double t0 = 0, level = c;
    for (double l : lv) {
        s.slabs.push_back({t0, l - c, lower_barrier_at(f, level), upper_barrier_at(f, level)});
        t0 = l - c;
        level = l;
    }
    s.slabs.push_back({t0, s.horizon, lower_barrier_at(f, level), upper_barrier_at(f, level)});
    return s;
}

double theta(const StepProfile& f, double x, const CorridorOptions& opt) {
    const auto s = theta_schedule(f, x);
    if (s.slabs.empty()) return 1.0;
    return corridor_survival(s, x, opt).value;
}

ThetaField::ThetaField(const StepProfile& g, const std::vector<double>& extra_levels, double roi_lo, double roi_hi,
                       int q, int refine)
    : xi_(g.xi()) {
    for (double l : g.levels())
        if (l < xi_) grid_.push_back(l);
    for (double l : extra_levels)
        if (l >= 0 && l < xi_) grid_.push_back(l);
    std::sort(grid_.begin(), grid_.end());
    grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());
    std::vector<double> dur;
    for (std::size_t j = 0; j < grid_.size(); ++j) {
        up_.push_back(upper_barrier_at(g, grid_[j]));
        down_.push_back(lower_barrier_at(g, grid_[j]));
        dur.push_back((j + 1 < grid_.size() ? grid_[j + 1] : xi_) - grid_[j]);
    }
    BackwardOptions bo;
    bo.q = q;
    bo.refine = refine;
    sol_ = solve_backward(close_corridors(dur, down_, up_, roi_lo, roi_hi), bo);
}

std::size_t ThetaField::index(double c) const {
    auto it = std::lower_bound(grid_.begin(), grid_.end(), c);
    check_invariant(it != grid_.end() && *it == c, "theta field: start level not on the level grid");
    return static_cast<std::size_t>(it - grid_.begin());
}

double ThetaField::operator()(double c, double x) const {
    if (c >= xi_) return 1.0;
    return std::min(1.0, std::max(0.0, sol_[index(c)](x)));
}

double ThetaField::upper_barrier(double c) const { return c >= xi_ ? kInf : up_[index(c)]; }
double ThetaField::lower_barrier(double c) const { return c >= xi_ ? -kInf : down_[index(c)]; }

namespace {

struct Piece {
    double a, b;
    double level;
    bool sing_a, sing_b;
};

struct PieceSum {
    double value = 0, error = 0;
    std::size_t nodes = 0;
};

constexpr double kTiny = 1e-300;

// Adaptive bisection on an absolute target; Boost's own driver only takes a
// relative one, which never settles on pieces where the integrand is ~0.
template <class F>
double adaptive_gk(const F& f, double a, double b, double tol, int depth, double& err) {
    using boost::math::quadrature::gauss_kronrod;
    double e = 0;
    const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0, &e);
    if (e <= tol || depth == 0) {
        err += e;
        return v;
    }
    const double m = 0.5 * (a + b);
    return adaptive_gk(f, a, m, 0.5 * tol, depth - 1, err) + adaptive_gk(f, m, b, 0.5 * tol, depth - 1, err);
}

// -int log theta over one constancy piece; log substitution near barrier ends,
// and a linear model theta ~ slope * h on the last stretch h < hc.
PieceSum integrate_piece(const ThetaField& field, const Piece& p, double tol) {
    PieceSum out;
    auto g = [&](double x) {
        ++out.nodes;
        return -std::log(std::max(field(p.level, x), kTiny));
    };
    const double w = p.b - p.a;
    if (!(w > 0)) return out;
    const double he = std::min(0.1, w / 3);
    const double a1 = p.sing_a ? p.a + he : p.a, b1 = p.sing_b ? p.b - he : p.b;
    CompensatedSum sum;
    double err = 0;
    if (b1 > a1) {
        sum.add(adaptive_gk(g, a1, b1, tol, 18, err));
    }
    const double hc = 1e-8 * he;
    for (int side = 0; side < 2; ++side) {
        const bool sing = side == 0 ? p.sing_a : p.sing_b;
        if (!sing) continue;
        const double end = side == 0 ? p.a : p.b, dir = side == 0 ? 1.0 : -1.0;
        auto gs = [&](double s) {
            const double h = std::exp(-s);
            return g(end + dir * h) * h;
        };
        sum.add(adaptive_gk(gs, -std::log(he), -std::log(hc), tol, 18, err));
        // int_0^hc -log(theta(hc) h / hc) dh
        const double tail = hc * (g(end + dir * hc) + 1.0);
        sum.add(tail);
        err += 1e-3 * tail;
    }
    out.value = sum.value();
    out.error = err;
    return out;
}

// int_a^inf erfc(z / sqrt(2 s2)) dz
double erfc_tail_integral(double a, double s2) {
    const double r = std::sqrt(2 * s2), w = a / r;
    return r * (std::exp(-w * w) / std::sqrt(M_PI) - w * std::erfc(w));
}

struct Plan {
    std::vector<Piece> pieces;
    double x_lo;
    double tail_bound;
    std::vector<double> singular;
};

EnergyReport run_plan(const StepProfile& g, const std::vector<double>& extra, const Plan& plan, double roi_lo,
                      double roi_hi, const EnergyOptions& opt) {
    EnergyReport r;
    r.singular_points = plan.singular;
    r.abs_error = plan.tail_bound;
    if (plan.pieces.empty()) return r;
    auto integrate_all = [&](int refine, std::size_t& nodes, double& qerr) {
        const ThetaField field(g, extra, roi_lo, roi_hi, opt.q, refine);
        CompensatedSum s;
        qerr = 0;
        for (const auto& p : plan.pieces) {
            const auto ps = integrate_piece(field, p, opt.piece_tol);
            s.add(ps.value);
            qerr += ps.error;
            nodes += ps.nodes;
        }
        return s.value();
    };
    double qerr = 0;
    r.value = integrate_all(2, r.nodes, qerr);
    r.abs_error += qerr;
    if (opt.error_check) {
        std::size_t n2 = 0;
        double qerr2 = 0;
        const double coarse = integrate_all(1, n2, qerr2);
        r.abs_error += std::fabs(r.value - coarse);
    }
    r.value = std::max(0.0, r.value);
    return r;
}

// Constancy pieces of the start-level staircase st on [lo, hi]; barriers from g.
Plan make_plan(const StepProfile& g, const Staircase& st, double lo_window, double hi_window) {
    Plan plan;
    const double xi = g.xi();
    plan.x_lo = st.breaks.front() - 8 * std::sqrt(xi);
    const double lo = std::max(plan.x_lo, lo_window), hi = hi_window;
    if (lo_window < plan.x_lo) {
        const double d = g.pos().front().loc - plan.x_lo;
        const double q0 = std::erfc(d / std::sqrt(2 * xi));
        plan.tail_bound = erfc_tail_integral(d, xi) / (1 - q0);
    } else {
        plan.tail_bound = 0;
    }
    const std::size_t m = st.breaks.size();
    for (std::size_t k = 0; k <= m; ++k) {
        const double level = st.cells[k];
        if (level >= xi) continue;
        const double cl = k == 0 ? -kInf : st.breaks[k - 1], ch = k == m ? kInf : st.breaks[k];
        const double a = std::max(cl, lo), b = std::min(ch, hi);
        if (!(b > a)) continue;
        Piece p{a, b, level, a == cl && lower_barrier_at(g, level) == a, b == ch && upper_barrier_at(g, level) == b};
        check_invariant(std::isfinite(a) && std::isfinite(b), "energy: unbounded piece with level below xi");
        if (p.sing_a) plan.singular.push_back(a);
        if (p.sing_b) plan.singular.push_back(b);
        plan.pieces.push_back(p);
    }
    std::sort(plan.singular.begin(), plan.singular.end());
    plan.singular.erase(std::unique(plan.singular.begin(), plan.singular.end()), plan.singular.end());
    return plan;
}

EnergyReport windowed(const StepProfile& f, double lo, double hi, const EnergyOptions& opt) {
    const auto st = to_staircase(f);
    const auto plan = make_plan(f, st, lo, hi);
    return run_plan(f, {}, plan, plan.x_lo, st.breaks.back(), opt);
}

}  // namespace

EnergyReport energy_total(const StepProfile& f, const EnergyOptions& opt) { return windowed(f, -kInf, kInf, opt); }

EnergyReport energy_windowed(const StepProfile& f, double M, const EnergyOptions& opt) {
    require(M > 0, "energy_windowed: M must be positive");
    return windowed(f, -M, M, opt);
}

EnergyReport energy_perturbed(const StepProfile& f, double delta, double M, const EnergyOptions& opt) {
    require(delta > 0 && std::isfinite(delta), "energy_perturbed: delta must be positive");
    require(M > 0, "energy_perturbed: M must be positive");
    const auto start = perturb(f, delta, PerturbSign::plus);
    const auto g = perturb_minus(f, delta);
    std::vector<double> extra(start.cells.begin(), start.cells.end());
    const auto plan = make_plan(g, start, -M, M);
    return run_plan(g, extra, plan, std::min(plan.x_lo, start.breaks.front()),
                    std::max(start.breaks.back(), g.pos().back().loc), opt);
}

nlohmann::json to_json(const EnergyReport& r) {
    return {{"value", r.value}, {"abs_error", r.abs_error}, {"nodes", r.nodes}, {"singular_points", r.singular_points}};
}

EnergyReport energy_from_json(const nlohmann::json& j) {
    EnergyReport r;
    try {
        for (const auto& [k, v] : j.items())
            if (k != "value" && k != "abs_error" && k != "nodes" && k != "singular_points")
                throw DomainError("energy JSON: unknown key " + k);
        r.value = j.at("value").get<double>();
        r.abs_error = j.at("abs_error").get<double>();
        r.nodes = j.at("nodes").get<std::size_t>();
        r.singular_points = j.at("singular_points").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed energy JSON: ") + e.what());
    }
    return r;
}

}  // namespace frogld
