#include "frogld/bm/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "frogld/core/error.hpp"
#include "frogld/core/parallel.hpp"
#include "frogld/core/rng.hpp"
#include "frogld/core/stats.hpp"

namespace frogld {

namespace {
constexpr std::int64_t kChunk = 1024;

std::mt19937_64 chunk_engine(std::uint64_t seed, std::int64_t chunk, std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(stream_key(seed, tag, static_cast<std::uint64_t>(chunk))),
                      static_cast<std::uint32_t>(stream_key(seed, tag, static_cast<std::uint64_t>(chunk)) >> 32),
                      static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
}

int threads_or_default(int t) { return t > 0 ? t : default_threads(); }

// probability that a Brownian bridge of variance h between two points at
// distances d1, d2 > 0 from a barrier touches it
inline double bridge_cross(double d1, double d2, double h) {
    const double e = 2.0 * d1 * d2 / h;
    return e > 60.0 ? 0.0 : std::exp(-e);
}
}  // namespace

McEstimate mc_corridor_oracle(const CorridorSchedule& s, double x, std::int64_t replicas, double dt,
                              std::uint64_t seed, int threads) {
    s.validate();
    require(replicas >= 2, "mc_corridor_oracle: need at least two replicas");
    require(dt > 0, "mc_corridor_oracle: dt must be positive");
    if (s.slabs.empty()) return {1.0, 0.0};
    double min_len = INFINITY;
    for (const auto& sl : s.slabs) min_len = std::min(min_len, sl.t1 - sl.t0);
    require(dt <= min_len / 4.0, "mc_corridor_oracle: dt must be <= min slab length / 4");
    require(x > s.slabs.front().lower && x < s.slabs.front().upper, "mc_corridor_oracle: start outside corridor");

    struct Plan {
        int steps;
        double h, sh, lower, upper;
    };
    std::vector<Plan> plan;
    for (const auto& sl : s.slabs) {
        const double len = sl.t1 - sl.t0;
        const int n = static_cast<int>(std::ceil(len / dt - 1e-9));
        plan.push_back({n, len / n, std::sqrt(len / n), sl.lower, sl.upper});
    }
    const auto m = chunked_reduce(
        replicas, kChunk, threads_or_default(threads), Moments{},
        [&](std::int64_t c, std::int64_t b, std::int64_t e) {
            auto eng = chunk_engine(seed, c, 0x636f72ULL);
            boost::random::normal_distribution<double> normal;
            Moments acc;
            for (std::int64_t r = b; r < e; ++r) {
                double X = x, w = 1.0;
                for (const auto& p : plan) {
                    const bool fl = std::isfinite(p.lower), fu = std::isfinite(p.upper);
                    const double near = 8.0 * p.sh;
                    for (int k = 0; k < p.steps && w > 0.0; ++k) {
                        const double Y = X + p.sh * normal(eng);
                        if ((fu && Y >= p.upper) || (fl && Y <= p.lower)) {
                            w = 0.0;
                            break;
                        }
                        if (fu && p.upper - Y < near && p.upper - X < near)
                            w *= 1.0 - bridge_cross(p.upper - X, p.upper - Y, p.h);
                        if (fl && Y - p.lower < near && X - p.lower < near)
                            w *= 1.0 - bridge_cross(X - p.lower, Y - p.lower, p.h);
                        X = Y;
                    }
                    if (w == 0.0) break;
                }
                acc.add(w);
            }
            return acc;
        },
        [](Moments a, const Moments& b) {
            a.merge(b);
            return a;
        });
    return {m.mean(), m.stderr_of_mean()};
}

FkgReport fkg_check(const std::vector<std::pair<double, double>>& barriers, double delta, double a, double t_hor,
                    std::int64_t replicas, double dt, std::uint64_t seed, int threads) {
    require(delta > 0, "fkg_check: delta must be positive");
    require(a > 0, "fkg_check: a must be positive");
    require(t_hor > 0 && dt > 0 && dt <= t_hor, "fkg_check: bad time grid");
    require(replicas >= 2, "fkg_check: need at least two replicas");
    for (const auto& [u, l] : barriers) require(u > 0 && l > 0, "fkg_check: barriers need positive location and time");

    // time grid through every barrier time inside the horizon
    std::vector<double> marks{0.0, t_hor};
    for (const auto& [u, l] : barriers) marks.push_back(l);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    struct Seg {
        int steps;
        double h, sh;
        double cap;  // max must stay below this during the segment
        bool ends_at_horizon;
    };
    std::vector<Seg> segs;
    for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
        const double len = marks[i + 1] - marks[i];
        const int n = std::max(1, static_cast<int>(std::ceil(len / dt - 1e-9)));
        double cap = INFINITY;
        for (const auto& [u, l] : barriers)
            if (l >= marks[i + 1]) cap = std::min(cap, u);
        segs.push_back({n, len / n, std::sqrt(len / n), cap, marks[i + 1] == t_hor});
    }

    struct Counts {
        std::int64_t nb = 0, n00 = 0, n01 = 0, n10 = 0, n11 = 0;
    };
    const auto cnt = chunked_reduce(
        replicas, kChunk, threads_or_default(threads), Counts{},
        [&](std::int64_t c, std::int64_t b, std::int64_t e) {
            auto eng = chunk_engine(seed, c, 0x666b67ULL);
            boost::random::normal_distribution<double> normal;
            boost::random::uniform_01<double> unif;
            Counts acc;
            for (std::int64_t r = b; r < e; ++r) {
                double X = 0.0, mx = 0.0, mn = 0.0, mx_h = 0.0, mn_h = 0.0;
                bool inB = true;
                for (const auto& sg : segs) {
                    for (int k = 0; k < sg.steps; ++k) {
                        const double Y = X + sg.sh * normal(eng);
                        const double d2 = (Y - X) * (Y - X);
                        const double top = 0.5 * (X + Y + std::sqrt(d2 - 2.0 * sg.h * std::log(1.0 - unif(eng))));
                        const double bot = 0.5 * (X + Y - std::sqrt(d2 - 2.0 * sg.h * std::log(1.0 - unif(eng))));
                        mx = std::max(mx, top);
                        mn = std::min(mn, bot);
                        X = Y;
                        if (mx >= sg.cap) {
                            inB = false;
                            break;
                        }
                    }
                    if (!inB) break;
                    if (sg.ends_at_horizon) {
                        mx_h = mx;
                        mn_h = mn;
                    }
                }
                if (!inB) continue;
                ++acc.nb;
                const bool A = mn_h > -delta, D = mx_h >= a;
                if (A && D)
                    ++acc.n11;
                else if (A)
                    ++acc.n10;
                else if (D)
                    ++acc.n01;
                else
                    ++acc.n00;
            }
            return acc;
        },
        [](Counts x, const Counts& y) {
            x.nb += y.nb;
            x.n00 += y.n00;
            x.n01 += y.n01;
            x.n10 += y.n10;
            x.n11 += y.n11;
            return x;
        });
    if (cnt.nb == 0) throw EstimationFailedError("fkg_check: conditioning event never observed", 0);
    const double n = static_cast<double>(cnt.nb);
    const double pa = (cnt.n10 + cnt.n11) / n, pd = (cnt.n01 + cnt.n11) / n, pad = cnt.n11 / n;
    // lhs - rhs is the sample covariance of the indicators; its variance is
    // Var[(A - pa)(D - pd)] / n
    double m2 = 0.0;
    const double fr[4] = {cnt.n00 / n, cnt.n01 / n, cnt.n10 / n, cnt.n11 / n};
    const int av[4] = {0, 0, 1, 1}, dv[4] = {0, 1, 0, 1};
    const double cov = pad - pa * pd;
    for (int i = 0; i < 4; ++i) {
        const double v = (av[i] - pa) * (dv[i] - pd) - cov;
        m2 += fr[i] * v * v;
    }
    return {pad, pa * pd, std::sqrt(m2 / n), pa, pd, cnt.nb};
}

}  // namespace frogld
