#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "frogld/energy/energy.hpp"
#include "frogld/frog/estimators.hpp"
#include "frogld/profile/profile.hpp"

namespace frogld {

// Unconstrained coordinates for step profiles with k_pos / k_neg jumps.
// Layout: k_pos location steps, k_pos - 1 level steps, then (if k_neg > 0)
// k_neg location steps, k_neg level steps and one slack.  Every coordinate
// is clamped to [-12, 6] before exponentiation.
struct ProfileParams {
    double xi;
    int k_pos;
    int k_neg;
    std::size_t dim() const;
    StepProfile decode(const std::vector<double>& p) const;
    std::vector<double> encode(const StepProfile& f) const;
};

inline constexpr double kParamLo = -12.0;
inline constexpr double kParamHi = 6.0;

struct OptimizerOptions {
    int restarts = 4;
    std::uint64_t seed = 1;
    double tol = 1e-4;
    int max_iter = 500;
    double step = 0.5;
    int threads = 0;
    EnergyOptions energy{};
};

struct RateEstimate {
    double xi = 0;
    int k_pos = 0;
    int k_neg = 0;
    double r_hat = 0;
    double r_hat_error = 0;
    std::optional<StepProfile> best_profile;
    int restarts = 0;
    std::vector<double> trace;  // best value per restart
    std::int64_t evaluations = 0;
};

// Splits one positive jump (or adds a far negative one) so a (k-1)-jump
// optimum becomes a start point with one more jump.
StepProfile split_for_warm_start(const StepProfile& f, int k_pos, int k_neg);

RateEstimate minimize_energy(double xi, int k_pos, int k_neg, const OptimizerOptions& opt,
                             const std::optional<StepProfile>& warm = std::nullopt);

// k_pos = 1..k (k_neg fixed) with warm starts; one estimate per k.
std::vector<RateEstimate> minimize_energy_chain(double xi, int k, int k_neg, const OptimizerOptions& opt);

struct RateRow {
    double xi;
    double r_hat;
    double r_over_sqrt_xi;
};

// k jumps on each side.
std::vector<RateRow> rate_curve(const std::vector<double>& xis, int k, const OptimizerOptions& opt,
                                std::vector<RateEstimate>* details = nullptr);
std::string rate_curve_csv(const std::vector<RateRow>& rows);

struct ComparisonRow {
    TailEstimate tail;
    std::optional<double> empirical_rate;
    double predicted_rate;  // r_hat * sqrt(xi)
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    bool monotone = true;     // empirical rates monotone in n
    bool approaching = true;  // |empirical - predicted| nonincreasing in n
    bool zero_hits = false;
};

ComparisonReport compare_with_simulation(double r_hat, const std::vector<std::int64_t>& ns, double M, double xi,
                                         std::int64_t replicas, std::uint64_t seed, const McOptions& mc = {});
std::string comparison_csv(const ComparisonReport& r);

nlohmann::json to_json(const RateEstimate& r);
RateEstimate rate_from_json(const nlohmann::json& j);

}  // namespace frogld
