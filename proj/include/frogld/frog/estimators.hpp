#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace frogld {

struct MuEstimate {
    double mu_hat = 0;
    double ci_low = 0;
    double ci_high = 0;
    double stderr_ = 0;
    std::int64_t replicas = 0;
    std::int64_t censored = 0;
};

struct TailEstimate {
    std::int64_t n = 0;
    std::optional<double> M;  // absent for the global tail
    double xi = 0;
    std::int64_t replicas = 0;
    std::int64_t hits = 0;
    double p_hat = 0;
    double ci_low = 0;
    double ci_high = 0;
    std::optional<double> rate;  // -log(p_hat)/sqrt(n), only when hits >= 1
    bool zero_hits = false;
};

struct McOptions {
    int threads = 0;  // 0: default
};

// Seed of replica r under master seed s.
std::uint64_t replica_seed(std::uint64_t master, std::int64_t replica);

MuEstimate estimate_mu(std::int64_t n, std::int64_t replicas, std::uint64_t seed, const McOptions& opt = {});

// Fraction of replicas in which target is not visited before time b.
TailEstimate estimate_tail(std::int64_t target, std::int64_t b, std::int64_t replicas, std::uint64_t seed,
                           const McOptions& opt = {});

TailEstimate estimate_tail_local(std::int64_t n, double M, double xi, std::int64_t replicas, std::uint64_t seed,
                                 const McOptions& opt = {});
TailEstimate estimate_tail_global(std::int64_t n, double xi, double mu_hat, std::int64_t replicas, std::uint64_t seed,
                                  const McOptions& opt = {});

// Empirical law of T(0,target) on {0..k_max} plus a censored tail mass.
std::vector<double> passage_time_histogram(std::int64_t target, std::int64_t k_max, std::int64_t replicas,
                                           std::uint64_t seed, const McOptions& opt = {});

std::string tail_csv_header();
std::string tail_csv_row(const TailEstimate& t);
std::vector<TailEstimate> parse_tail_csv(const std::string& text);

std::int64_t local_target(std::int64_t n, double M);
std::int64_t ceil_budget(double x);

}  // namespace frogld
