#pragma once

#include <vector>

#include "frogld/profile/profile.hpp"

namespace frogld {

struct ClosedInterval {
    double lo;
    double hi;
};

struct Heights {
    double m;      // inf over I
    double M;      // sup over I
    double delta;  // M - m
};

Heights delta_height(const StepProfile& f, const ClosedInterval& I);

// Intervals must be pairwise disjoint; processed in the given order.
StepProfile soft_deform(const StepProfile& f, const std::vector<ClosedInterval>& J);

// Exact pointwise hard deformation.
Staircase hard_deform_pointwise(const StepProfile& f, const std::vector<ClosedInterval>& J);
// Same, read back under the continuity convention.
StepProfile hard_deform(const StepProfile& f, const std::vector<ClosedInterval>& J);

}  // namespace frogld
