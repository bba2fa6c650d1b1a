#include "frogld/cover/oracle.hpp"

#include "frogld/core/error.hpp"

namespace frogld {

FrontOracle::FrontOracle(const SimulationRun& run) {
    require(run.start == 0, "front oracle: run must start at 0");
    for (std::int64_t y = 0; run.in_domain(y); ++y) {
        const auto t = run.first_visit_at(y);
        if (!t) break;
        t_.push_back(*t);
    }
    require(!t_.empty(), "front oracle: run has no visits");
    hi_ = static_cast<std::int64_t>(t_.size()) - 1;
}

std::int64_t FrontOracle::passage(std::int64_t x, std::int64_t length) const {
    if (x < 0 || length < 0 || x + length > hi_) throw DomainError("front oracle: query outside the simulated window");
    return t_[static_cast<std::size_t>(x + length)] - t_[static_cast<std::size_t>(x)];
}

SimulationRun front_run(std::int64_t reach, std::uint64_t seed) {
    require(reach >= 1, "front_run: reach must be positive");
    // the budget only truncates frogs that cannot matter once the target is hit
    std::int64_t budget = 4 * reach + 64;
    for (;;) {
        auto run = simulate_run(reach, budget, StepSource::seeded(seed));
        if (run.passage_time) return run;
        budget *= 2;
    }
}

std::int64_t TableOracle::passage(std::int64_t x, std::int64_t length) const {
    if (x < 0 || length < 0 || x + length > hi_) throw DomainError("table oracle: query outside the window");
    auto it = table_.find({x, length});
    return it == table_.end() ? length : it->second;
}

AdditiveOracle::AdditiveOracle(const std::vector<std::int64_t>& w) {
    prefix_.push_back(0);
    for (auto v : w) {
        require(v >= 1, "additive oracle: edge weights must be >= 1");
        prefix_.push_back(prefix_.back() + v);
    }
}

std::int64_t AdditiveOracle::passage(std::int64_t x, std::int64_t length) const {
    if (x < 0 || length < 0 || x + length > window_hi()) throw DomainError("additive oracle: query outside the window");
    return prefix_[static_cast<std::size_t>(x + length)] - prefix_[static_cast<std::size_t>(x)];
}

}  // namespace frogld
