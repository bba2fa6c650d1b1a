#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace frogld {

using MaybeTime = std::optional<std::int64_t>;

struct StepSource {
    enum class Mode { seeded, scripted };
    Mode mode = Mode::seeded;
    std::uint64_t seed = 0;
    std::map<std::int64_t, std::vector<int>> scripts;

    static StepSource seeded(std::uint64_t seed);
    static StepSource scripted(std::map<std::int64_t, std::vector<int>> scripts);
};

struct SiteRange {
    std::int64_t lo;
    std::int64_t hi;
    bool contains(std::int64_t x) const { return lo <= x && x <= hi; }
};

struct SimulationRun {
    std::int64_t target = 1;
    std::int64_t start = 0;
    std::int64_t budget = 1;
    std::int64_t x_lo = 0;
    std::int64_t x_hi = 0;
    std::vector<MaybeTime> first_visit;  // index x - x_lo
    std::vector<MaybeTime> activation;
    MaybeTime passage_time;

    bool in_domain(std::int64_t x) const { return x_lo <= x && x <= x_hi; }
    MaybeTime first_visit_at(std::int64_t x) const;
    MaybeTime activation_at(std::int64_t x) const;
};

struct SimOptions {
    // frogs left of start are simulated iff 2*dist + (target-start) <= margin_factor*budget
    double margin_factor = 1.0;
    bool record = true;
};

SimulationRun simulate_run(std::int64_t target, std::int64_t budget, const StepSource& source,
                           const SimOptions& opt = {});

SimulationRun restricted_run(std::int64_t target, std::int64_t start, std::optional<SiteRange> allowed,
                             std::int64_t budget, const StepSource& source, const SimOptions& opt = {});

// Passage time only; reuses thread-local buffers.  Seeded sources only.
MaybeTime seeded_passage_time(std::int64_t target, std::int64_t budget, std::uint64_t seed);

struct PassageProfile {
    double n = 1;
    std::int64_t k_lo = 0;
    std::vector<double> u;  // k / sqrt(n)
    std::vector<double> f;  // T(0,k) / n
};

PassageProfile extract_profile(const SimulationRun& run, double n, std::int64_t k_lo, std::int64_t k_hi);
PassageProfile extract_profile(const SimulationRun& run, double n);

nlohmann::json to_json(const SimulationRun& run);
SimulationRun run_from_json(const nlohmann::json& j);

}  // namespace frogld
