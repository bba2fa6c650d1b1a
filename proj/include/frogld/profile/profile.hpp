#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "frogld/frog/simulation.hpp"

namespace frogld {

struct Jump {
    double loc;
    double level;
    bool operator==(const Jump&) const = default;
};

// A profile in C^Step(xi).  Positive side right-continuous, negative side
// left-continuous, zero on the gap around 0.
class StepProfile {
public:
    StepProfile(double xi, std::vector<Jump> pos, std::vector<Jump> neg);
    static StepProfile unit_jump(double at, double xi = 1.0);

    double xi() const { return xi_; }
    const std::vector<Jump>& pos() const { return pos_; }
    const std::vector<Jump>& neg() const { return neg_; }
    double operator()(double x) const;

    // Distinct levels in increasing order, 0 first.
    std::vector<double> levels() const;
    // Every jump location, increasing.
    std::vector<double> jump_locations() const;

    bool operator==(const StepProfile&) const = default;

private:
    double xi_;
    std::vector<Jump> pos_;  // locations increasing
    std::vector<Jump> neg_;  // locations decreasing (innermost first)
};

// General right/left-agnostic staircase: values on the open cells between
// breakpoints plus the values at the breakpoints themselves.
struct Staircase {
    std::vector<double> breaks;  // strictly increasing
    std::vector<double> cells;   // breaks.size() + 1, cells[0] on (-inf, breaks[0])
    std::vector<double> points;  // breaks.size()

    double operator()(double x) const;
    double sup_on(double l, double r) const;  // closed interval
    double inf_on(double l, double r) const;
    Staircase simplified() const;
};

Staircase to_staircase(const StepProfile& f);

// Reads a staircase as a StepProfile.  With strict = false, point values
// that disagree with the continuity convention are replaced by the
// convention's value (a change on finitely many points).
std::optional<StepProfile> to_step_profile(const Staircase& s, bool strict);

StepProfile rescale(const StepProfile& f);
StepProfile unrescale(const StepProfile& f, double xi);

enum class PerturbSign { plus, minus };
// f^{+,eps}(u) = sup over [u-eps, u+eps];  f^{-,eps}(u) = inf over it.
Staircase perturb(const StepProfile& f, double eps, PerturbSign sign);
// f^{-,eps} always stays in C^Step(xi).
StepProfile perturb_minus(const StepProfile& f, double eps);

StepProfile from_empirical(const PassageProfile& p);

nlohmann::json to_json(const StepProfile& f);
StepProfile profile_from_json(const nlohmann::json& j);

}  // namespace frogld
