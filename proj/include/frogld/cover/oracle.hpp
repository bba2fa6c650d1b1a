#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "frogld/frog/simulation.hpp"

namespace frogld {

// T(x, x+length) queries.
class PassageOracle {
public:
    virtual ~PassageOracle() = default;
    virtual std::int64_t passage(std::int64_t x, std::int64_t length) const = 0;
    // Largest right endpoint x+length that may be queried.
    virtual std::int64_t window_hi() const = 0;
    virtual bool simulation_backed() const { return false; }
};

// Backed by one run from 0: T(x, x+L) = T(0, x+L) - T(0, x).
class FrontOracle : public PassageOracle {
public:
    explicit FrontOracle(const SimulationRun& run);
    std::int64_t passage(std::int64_t x, std::int64_t length) const override;
    std::int64_t window_hi() const override { return hi_; }
    bool simulation_backed() const override { return true; }

private:
    std::int64_t hi_ = 0;
    std::vector<std::int64_t> t_;  // T(0, y) for y in [0, hi_]
};

// Seeded run reaching x = reach with first visits for all of [0, reach].
SimulationRun front_run(std::int64_t reach, std::uint64_t seed);

// Explicit entries on top of the ballistic default T = length.
class TableOracle : public PassageOracle {
public:
    explicit TableOracle(std::int64_t window_hi) : hi_(window_hi) {}
    void set(std::int64_t x, std::int64_t length, std::int64_t t) { table_[{x, length}] = t; }
    std::int64_t passage(std::int64_t x, std::int64_t length) const override;
    std::int64_t window_hi() const override { return hi_; }

private:
    std::int64_t hi_;
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> table_;
};

// T(x, y) = sum of per-edge weights over [x, y).
class AdditiveOracle : public PassageOracle {
public:
    explicit AdditiveOracle(const std::vector<std::int64_t>& edge_weights);
    std::int64_t passage(std::int64_t x, std::int64_t length) const override;
    std::int64_t window_hi() const override { return static_cast<std::int64_t>(prefix_.size()) - 1; }

private:
    std::vector<std::int64_t> prefix_;
};

}  // namespace frogld
