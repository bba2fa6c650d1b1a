#pragma once

#include <vector>

#include <json.hpp>

namespace frogld {

struct Slab {
    double t0;
    double t1;
    double lower;  // may be -inf
    double upper;  // may be +inf
};

struct CorridorSchedule {
    double horizon = 0;
    std::vector<Slab> slabs;

    // Throws PreconditionError on any broken invariant.
    void validate() const;
    bool any_finite_barrier() const;
};

nlohmann::json to_json(const CorridorSchedule& s);
CorridorSchedule schedule_from_json(const nlohmann::json& j);

}  // namespace frogld
