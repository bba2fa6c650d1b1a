#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace frogld {

// Violated precondition of a public operation.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation that is well posed but could not deliver a result.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ScriptUnderrunError : public DomainError {
public:
    ScriptUnderrunError(std::int64_t site, std::size_t used)
        : DomainError("script exhausted for frog at site " + std::to_string(site) + " after " +
                      std::to_string(used) + " steps"),
          site_(site) {}
    std::int64_t site() const { return site_; }

private:
    std::int64_t site_;
};

class EstimationFailedError : public DomainError {
public:
    EstimationFailedError(const std::string& what, std::int64_t censored)
        : DomainError(what + " (censored runs: " + std::to_string(censored) + ")"), censored_(censored) {}
    std::int64_t censored() const { return censored_; }

private:
    std::int64_t censored_;
};

// Internal consistency check that must hold by construction.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw PreconditionError(msg);
}

inline void check_invariant(bool ok, const std::string& msg) {
    if (!ok) throw InvariantError(msg);
}

}  // namespace frogld
