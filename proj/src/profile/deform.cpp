#include "frogld/profile/deform.hpp"

#include <algorithm>
#include <cmath>

#include "frogld/core/error.hpp"

namespace frogld {

namespace {
void check_disjoint(const std::vector<ClosedInterval>& J) {
    std::vector<ClosedInterval> s = J;
    for (const auto& I : s) require(std::isfinite(I.lo) && std::isfinite(I.hi) && I.lo <= I.hi, "deform: bad interval");
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < s.size(); ++i)
        require(s[i - 1].hi < s[i].lo, "deform: intervals in J must be pairwise disjoint");
}

std::vector<Jump> map_levels(const std::vector<Jump>& js, double m, double M, double d) {
    std::vector<Jump> out;
    double prev = 0.0;
    for (const auto& j : js) {
        const double v = j.level <= m ? j.level : (j.level <= M ? m : j.level - d);
        if (v > prev) {
            out.push_back({j.loc, v});
            prev = v;
        }
    }
    return out;
}
}  // namespace

Heights delta_height(const StepProfile& f, const ClosedInterval& I) {
    require(I.lo <= I.hi, "delta_height: empty interval");
    const auto st = to_staircase(f);
    const double m = st.inf_on(I.lo, I.hi), M = st.sup_on(I.lo, I.hi);
    return {m, M, M - m};
}

StepProfile soft_deform(const StepProfile& f, const std::vector<ClosedInterval>& J) {
    check_disjoint(J);
    StepProfile g = f;
    for (const auto& I : J) {
        const auto h = delta_height(g, I);
        if (h.delta == 0) continue;
        const double xi = g.xi() - h.delta;
        if (!(xi > 0)) throw DomainError("soft deformation collapses the profile to zero");
        auto pos = map_levels(g.pos(), h.m, h.M, h.delta);
        auto neg = map_levels(g.neg(), h.m, h.M, h.delta);
        g = StepProfile(xi, std::move(pos), std::move(neg));
    }
    return g;
}

Staircase hard_deform_pointwise(const StepProfile& f, const std::vector<ClosedInterval>& J) {
    check_disjoint(J);
    const auto st = to_staircase(f);
    std::vector<double> vals;
    for (const auto& I : J) vals.push_back(st.inf_on(I.lo, I.hi));
    Staircase out;
    out.breaks = st.breaks;
    for (const auto& I : J) {
        out.breaks.push_back(I.lo);
        out.breaks.push_back(I.hi);
    }
    std::sort(out.breaks.begin(), out.breaks.end());
    out.breaks.erase(std::unique(out.breaks.begin(), out.breaks.end()), out.breaks.end());
    const std::size_t m = out.breaks.size();
    out.cells.resize(m + 1);
    out.points.resize(m);
    for (std::size_t k = 0; k <= m; ++k) {
        // f is constant on the cell; index it by the cell's left end
        const std::size_t fc = k == 0 ? 0
                                      : static_cast<std::size_t>(std::upper_bound(st.breaks.begin(), st.breaks.end(),
                                                                                  out.breaks[k - 1]) -
                                                                 st.breaks.begin());
        double v = st.cells[fc];
        if (k > 0 && k < m)
            for (std::size_t i = 0; i < J.size(); ++i)
                if (J[i].lo <= out.breaks[k - 1] && out.breaks[k] <= J[i].hi) v = vals[i];
        out.cells[k] = v;
    }
    for (std::size_t k = 0; k < m; ++k) {
        double v = st(out.breaks[k]);
        for (std::size_t i = 0; i < J.size(); ++i)
            if (J[i].lo <= out.breaks[k] && out.breaks[k] <= J[i].hi) v = vals[i];
        out.points[k] = v;
    }
    return out;
}

StepProfile hard_deform(const StepProfile& f, const std::vector<ClosedInterval>& J) {
    auto g = to_step_profile(hard_deform_pointwise(f, J), false);
    check_invariant(g.has_value(), "hard deformation left the step-profile class");
    return *g;
}

}  // namespace frogld
