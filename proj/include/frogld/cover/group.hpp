#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "frogld/cover/cover.hpp"

namespace frogld {

struct Segment {
    double s;
    double t;
    bool operator==(const Segment&) const = default;
};

double segment_distance(const Segment& a, const Segment& b);

struct GroupedCover {
    std::vector<Segment> intervals;
    double R = 0;
    std::size_t m() const { return intervals.size(); }
};

// Hulls of the classes of the chain relation d <= R.
GroupedCover group_intervals(const std::vector<Segment>& in, double R);

// The four properties of the grouping, checked against its input.
CheckResult validate_grouping(const std::vector<Segment>& in, const GroupedCover& g);

// Membership in S_M(n): 1 <= m <= M, integer endpoints in [0, n] with s < t,
// separation > M^3 sqrt(n), total length <= M^6 sqrt(n).
CheckResult validate_SM(const GroupedCover& g, double M, std::int64_t n);

// [S_j, T_j + L_j] for the pieces with L_j >= 2^k_floor.
std::vector<Segment> piece_segments(const IntervalCover& c, int k_floor = 0);

nlohmann::json to_json(const GroupedCover& g);

// Moderate-interval clustering.  Grid interval j stands for [j/n, (j+1)/n].
struct Cluster {
    int index;                        // 1, 2, ... on the positive side; -1, -2, ... on the negative side
    std::vector<std::int64_t> members;
    std::int64_t n_i;
    std::int64_t t_grid;              // t_i * n
    double t;
    // F_i = [t - K n_i / n, t) for index > 0, (t, t + K n_i / n] for index < 0, in grid units
    std::int64_t F_lo_grid, F_hi_grid;
};

// All intervals on one side of 0; clusters are numbered from that side's 1.
std::vector<Cluster> cluster_moderate(const std::vector<std::int64_t>& grid_intervals, std::int64_t K, std::int64_t n);
// Positive side then negative side.
std::vector<Cluster> cluster_moderate_all(const std::vector<std::int64_t>& pos, const std::vector<std::int64_t>& neg,
                                          std::int64_t K, std::int64_t n);
CheckResult validate_clusters(const std::vector<Cluster>& cs);

}  // namespace frogld
