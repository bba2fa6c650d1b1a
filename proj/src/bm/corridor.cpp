#include "frogld/bm/corridor.hpp"

#include <algorithm>
#include <cmath>

#include "frogld/bm/backward.hpp"
#include "frogld/bm/hitting.hpp"
#include "frogld/core/error.hpp"

namespace frogld {

SurvivalReport corridor_survival(const CorridorSchedule& s, double x, const CorridorOptions& opt) {
    s.validate();
    require(std::isfinite(x), "corridor_survival: start must be finite");
    if (s.slabs.empty()) return {1.0, 0.0};
    const auto& first = s.slabs.front();
    require(x > first.lower && x < first.upper, "corridor_survival: start not strictly inside the initial corridor");
    if (!s.any_finite_barrier()) return {1.0, 0.0};
    if (s.slabs.size() == 1) return {two_barrier_survival(first.lower, first.upper, x, s.horizon), 0.0};

    std::vector<double> dur, lo, hi;
    for (const auto& sl : s.slabs) {
        dur.push_back(sl.t1 - sl.t0);
        lo.push_back(sl.lower);
        hi.push_back(sl.upper);
    }
    const auto closed = close_corridors(dur, lo, hi, x, x);
    BackwardOptions bo;
    bo.q = opt.q;
    auto clamp01 = [](double v) { return std::min(1.0, std::max(0.0, v)); };
    const double coarse = clamp01(solve_backward(closed, bo).front()(x));
    if (!opt.richardson) return {coarse, 0.0};
    bo.refine = 2;
    const double fine = clamp01(solve_backward(closed, bo).front()(x));
    return {fine, std::fabs(fine - coarse)};
}

}  // namespace frogld
