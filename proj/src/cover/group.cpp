#include "frogld/cover/group.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "frogld/core/error.hpp"

namespace frogld {

double segment_distance(const Segment& a, const Segment& b) {
    return std::max(0.0, std::max(a.s, b.s) - std::min(a.t, b.t));
}

GroupedCover group_intervals(const std::vector<Segment>& in, double R) {
    require(R > 0, "group_intervals: R must be positive");
    for (const auto& s : in) require(s.s <= s.t, "group_intervals: interval with s > t");
    GroupedCover g;
    g.R = R;
    std::vector<Segment> v = in;
    std::sort(v.begin(), v.end(), [](const Segment& a, const Segment& b) { return a.s < b.s; });
    // sorted by left end, a class closes once the next start is more than R past its right end
    for (const auto& s : v) {
        if (!g.intervals.empty() && s.s - g.intervals.back().t <= R)
            g.intervals.back().t = std::max(g.intervals.back().t, s.t);
        else
            g.intervals.push_back(s);
    }
    return g;
}

CheckResult validate_grouping(const std::vector<Segment>& in, const GroupedCover& g) {
    CheckResult r;
    std::set<double> xs, ys;
    double in_len = 0, out_len = 0;
    for (const auto& s : in) {
        xs.insert(s.s);
        ys.insert(s.t);
        in_len += s.t - s.s;
    }
    for (const auto& o : g.intervals) {
        if (!xs.count(o.s) || !ys.count(o.t)) r.fail("grouped endpoint not drawn from the input");
        out_len += o.t - o.s;
    }
    if (g.m() > in.size()) r.fail("more groups than inputs");
    if (out_len > 2.0 * static_cast<double>(in.size()) * g.R + in_len) r.fail("total length bound violated");
    for (std::size_t i = 0; i < g.m(); ++i)
        for (std::size_t j = i + 1; j < g.m(); ++j)
            if (segment_distance(g.intervals[i], g.intervals[j]) < g.R) r.fail("groups closer than R");
    for (const auto& s : in) {
        bool cov = false;
        for (const auto& o : g.intervals) cov = cov || (o.s <= s.s && s.t <= o.t);
        if (!cov) r.fail("input interval not covered");
    }
    return r;
}

CheckResult validate_SM(const GroupedCover& g, double M, std::int64_t n) {
    CheckResult r;
    const double sn = std::sqrt(static_cast<double>(n));
    if (g.m() < 1 || static_cast<double>(g.m()) > M) r.fail("m outside [1, M]");
    double total = 0;
    for (const auto& o : g.intervals) {
        if (o.s != std::floor(o.s) || o.t != std::floor(o.t)) r.fail("non-integer endpoint");
        if (o.s < 0 || o.t > static_cast<double>(n)) r.fail("endpoint outside [0, n]");
        if (!(o.s < o.t)) r.fail("empty interval");
        total += o.t - o.s;
    }
    for (std::size_t i = 0; i < g.m(); ++i)
        for (std::size_t j = i + 1; j < g.m(); ++j)
            if (!(segment_distance(g.intervals[i], g.intervals[j]) > M * M * M * sn)) r.fail("separation <= M^3 sqrt(n)");
    if (total > std::pow(M, 6) * sn) r.fail("total length > M^6 sqrt(n)");
    return r;
}

std::vector<Segment> piece_segments(const IntervalCover& c, int k_floor) {
    std::vector<Segment> v;
    for (const auto& p : c.pieces)
        if (p.k >= k_floor) v.push_back({static_cast<double>(p.S), static_cast<double>(p.T + p.scale)});
    return v;
}

nlohmann::json to_json(const GroupedCover& g) {
    auto a = nlohmann::json::array();
    for (const auto& s : g.intervals) a.push_back({s.s, s.t});
    return {{"intervals", a}, {"R", g.R}, {"m", g.m()}};
}

std::vector<Cluster> cluster_moderate(const std::vector<std::int64_t>& grid, std::int64_t K, std::int64_t n) {
    require(K >= 2, "cluster_moderate: K must be >= 2");
    require(n >= 1, "cluster_moderate: n must be positive");
    std::vector<Cluster> out;
    if (grid.empty()) return out;
    const bool pos = grid.front() >= 0;
    for (auto j : grid) require((j >= 0) == pos, "cluster_moderate: intervals on both sides of 0");
    std::vector<std::int64_t> rest = grid;
    // farthest from 0 first
    if (pos)
        std::sort(rest.begin(), rest.end(), std::greater<>());
    else
        std::sort(rest.begin(), rest.end());
    require(std::adjacent_find(rest.begin(), rest.end()) == rest.end(), "cluster_moderate: duplicate interval");
    int idx = 0;
    std::size_t at = 0;
    while (at < rest.size()) {
        const std::int64_t first = rest[at];
        std::size_t lam = 0;
        for (std::size_t i = 1; at + i - 1 < rest.size(); ++i) {
            const std::int64_t j = rest[at + i - 1], iK = static_cast<std::int64_t>(i) * K;
            // inf I_i > sup I_1 - iK/n, mirrored on the negative side
            const bool ok = pos ? j > first + 1 - iK : j + 1 < first + iK;
            if (!ok) break;
            lam = i;
        }
        check_invariant(lam >= 1, "cluster_moderate: empty cluster");
        Cluster c;
        c.index = pos ? ++idx : -(++idx);
        c.members.assign(rest.begin() + static_cast<std::ptrdiff_t>(at), rest.begin() + static_cast<std::ptrdiff_t>(at + lam));
        c.n_i = static_cast<std::int64_t>(lam);
        c.t_grid = pos ? first + 1 : first;
        c.t = static_cast<double>(c.t_grid) / static_cast<double>(n);
        c.F_lo_grid = pos ? c.t_grid - K * c.n_i : c.t_grid;
        c.F_hi_grid = pos ? c.t_grid : c.t_grid + K * c.n_i;
        out.push_back(std::move(c));
        at += lam;
    }
    return out;
}

std::vector<Cluster> cluster_moderate_all(const std::vector<std::int64_t>& pos, const std::vector<std::int64_t>& neg,
                                          std::int64_t K, std::int64_t n) {
    for (auto j : pos) require(j >= 0, "cluster_moderate_all: positive list has a negative interval");
    for (auto j : neg) require(j < 0, "cluster_moderate_all: negative list has a positive interval");
    auto out = cluster_moderate(pos, K, n);
    auto m = cluster_moderate(neg, K, n);
    out.insert(out.end(), m.begin(), m.end());
    return out;
}

CheckResult validate_clusters(const std::vector<Cluster>& cs) {
    CheckResult r;
    // positive F = [lo, hi), negative F = (lo, hi]
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = i + 1; j < cs.size(); ++j) {
            const auto& a = cs[i];
            const auto& b = cs[j];
            const std::int64_t lo = std::max(a.F_lo_grid, b.F_lo_grid), hi = std::min(a.F_hi_grid, b.F_hi_grid);
            bool overlap = lo < hi;
            if (lo == hi) {
                auto has = [lo](const Cluster& c) {
                    return c.index > 0 ? (lo >= c.F_lo_grid && lo < c.F_hi_grid) : (lo > c.F_lo_grid && lo <= c.F_hi_grid);
                };
                overlap = has(a) && has(b);
            }
            if (overlap) r.fail("F_" + std::to_string(a.index) + " meets F_" + std::to_string(b.index));
        }
    return r;
}

}  // namespace frogld
