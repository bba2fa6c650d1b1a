#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "frogld/bm/schedule.hpp"

namespace frogld {

struct McEstimate {
    double estimate;
    double stderr_;
};

McEstimate mc_corridor_oracle(const CorridorSchedule& s, double x, std::int64_t replicas, double dt,
                              std::uint64_t seed, int threads = 0);

struct FkgReport {
    double lhs;     // P(A and D | B)
    double rhs;     // P(A | B) P(D | B)
    double stderr_; // of lhs - rhs
    double p_a;
    double p_d;
    std::int64_t b_hits;
};

// barriers: (location u_i > 0, time l_i > 0) pairs; B = {max over [0, l_i] < u_i for all i}.
// A = {min over [0, t_hor] > -delta}, D = {max over [0, t_hor] >= a}.
FkgReport fkg_check(const std::vector<std::pair<double, double>>& barriers, double delta, double a, double t_hor,
                    std::int64_t replicas, double dt, std::uint64_t seed, int threads = 0);

}  // namespace frogld
