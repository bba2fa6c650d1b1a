#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "frogld/bm/backward.hpp"
#include "frogld/bm/corridor.hpp"
#include "frogld/bm/schedule.hpp"
#include "frogld/profile/profile.hpp"

namespace frogld {

struct EnergyReport {
    double value = 0;
    double abs_error = 0;
    std::size_t nodes = 0;
    std::vector<double> singular_points;
};

struct EnergyOptions {
    int q = 12;
    double piece_tol = 1e-9;   // absolute quadrature target per constancy piece
    bool error_check = true;   // second, coarser solve for the discretization error
};

// Barrier schedule for theta_f(x): the BM started at x may not reach y
// before time f(y) - f(x).
CorridorSchedule theta_schedule(const StepProfile& f, double x);
double theta(const StepProfile& f, double x, const CorridorOptions& opt = {});

// theta for every start level at once: one backward solve in level time.
// Barriers come from g; start levels may be any level of g or any of the
// extra levels.
class ThetaField {
public:
    ThetaField(const StepProfile& g, const std::vector<double>& extra_levels, double roi_lo, double roi_hi,
               int q, int refine);
    // Survival from x with start level c (c must be a grid level, or >= xi).
    double operator()(double c, double x) const;
    double upper_barrier(double c) const;  // +inf never happens below xi
    double lower_barrier(double c) const;  // may be -inf
    const std::vector<double>& grid() const { return grid_; }

private:
    std::size_t index(double c) const;
    double xi_;
    std::vector<double> grid_;
    std::vector<double> up_, down_;
    std::vector<PanelFunction> sol_;
};

double upper_barrier_at(const StepProfile& g, double level);
double lower_barrier_at(const StepProfile& g, double level);

EnergyReport energy_total(const StepProfile& f, const EnergyOptions& opt = {});
EnergyReport energy_windowed(const StepProfile& f, double M, const EnergyOptions& opt = {});
EnergyReport energy_perturbed(const StepProfile& f, double delta, double M, const EnergyOptions& opt = {});

nlohmann::json to_json(const EnergyReport& r);
EnergyReport energy_from_json(const nlohmann::json& j);

}  // namespace frogld
