#pragma once

#include "frogld/bm/schedule.hpp"

namespace frogld {

struct SurvivalReport {
    double value;
    double error_estimate;
};

struct CorridorOptions {
    int q = 12;
    bool richardson = true;
};

SurvivalReport corridor_survival(const CorridorSchedule& s, double x, const CorridorOptions& opt = {});

}  // namespace frogld
