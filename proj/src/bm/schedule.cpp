#include "frogld/bm/schedule.hpp"

#include <cmath>

#include "frogld/core/error.hpp"
#include "frogld/core/io.hpp"

namespace frogld {

void CorridorSchedule::validate() const {
    require(std::isfinite(horizon) && horizon >= 0, "schedule: horizon must be finite and >= 0");
    if (horizon == 0) {
        require(slabs.empty(), "schedule: zero horizon must have no slabs");
        return;
    }
    require(!slabs.empty(), "schedule: positive horizon needs slabs");
    require(slabs.front().t0 == 0.0, "schedule: first slab must start at 0");
    require(slabs.back().t1 == horizon, "schedule: last slab must end at the horizon");
    for (std::size_t i = 0; i < slabs.size(); ++i) {
        const auto& s = slabs[i];
        require(std::isfinite(s.t0) && std::isfinite(s.t1) && s.t1 > s.t0, "schedule: slab times must increase");
        require(!std::isnan(s.lower) && !std::isnan(s.upper), "schedule: NaN barrier");
        require(s.lower != std::numeric_limits<double>::infinity(), "schedule: lower barrier cannot be +inf");
        require(s.upper != -std::numeric_limits<double>::infinity(), "schedule: upper barrier cannot be -inf");
        require(s.lower < s.upper, "schedule: lower must be below upper");
        if (i > 0) {
            const auto& p = slabs[i - 1];
            require(p.t1 == s.t0, "schedule: slabs must be contiguous");
            require(s.upper >= p.upper, "schedule: upper barrier must be nondecreasing");
            require(s.lower <= p.lower, "schedule: lower barrier must be nonincreasing");
        }
    }
}

bool CorridorSchedule::any_finite_barrier() const {
    for (const auto& s : slabs)
        if (std::isfinite(s.lower) || std::isfinite(s.upper)) return true;
    return false;
}

nlohmann::json to_json(const CorridorSchedule& s) {
    auto slabs = nlohmann::json::array();
    for (const auto& sl : s.slabs)
        slabs.push_back({{"t0", sl.t0}, {"t1", sl.t1}, {"lower", ext_real_to_json(sl.lower)},
                         {"upper", ext_real_to_json(sl.upper)}});
    return {{"horizon", s.horizon}, {"slabs", slabs}};
}

CorridorSchedule schedule_from_json(const nlohmann::json& j) {
    CorridorSchedule s;
    try {
        s.horizon = j.at("horizon").get<double>();
        for (const auto& e : j.at("slabs"))
            s.slabs.push_back({e.at("t0").get<double>(), e.at("t1").get<double>(), ext_real_from_json(e.at("lower")),
                               ext_real_from_json(e.at("upper"))});
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed schedule JSON: ") + e.what());
    }
    s.validate();
    return s;
}

}  // namespace frogld
