#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "frogld/cover/oracle.hpp"

namespace frogld {

enum class LogBase { natural, base2 };

// N = ceil(2 log2(log n)) with the inner log in the chosen base.
int block_exponent(std::int64_t n, LogBase base = LogBase::natural);

struct BlockClassification {
    int N = 0;
    std::vector<std::int64_t> red;   // block starts
    std::vector<std::int64_t> blue;
};

BlockClassification classify_blocks(const PassageOracle& oracle, std::int64_t n, LogBase base = LogBase::natural);

struct CoverPiece {
    std::int64_t x;
    int k;              // scale is 2^k
    std::int64_t scale;
    std::int64_t S;
    std::int64_t T;
};

struct IntervalCover {
    std::int64_t n = 0;
    int N = 0;
    int k_min = 0;  // smallest scale searched
    int k_max = 0;  // largest scale searched
    std::vector<std::int64_t> red_blocks, blue_blocks;
    std::vector<CoverPiece> pieces;
    std::size_t ell() const { return pieces.size(); }
};

struct CoverOptions {
    LogBase base = LogBase::natural;
    int k_max = -1;      // default floor(log2 n) - 1
    int min_scale = -1;  // default N; stop once the radius drops below 2^min_scale
};

IntervalCover dyadic_cover(const PassageOracle& oracle, std::int64_t n, const CoverOptions& opt = {});

struct CheckResult {
    bool ok = true;
    std::vector<std::string> failures;
    void fail(std::string msg) {
        ok = false;
        failures.push_back(std::move(msg));
    }
};

// Red blocks covered, T(S, T + L) <= 16 L^2 where the scale above was
// searched, thirds disjoint, radii nonincreasing.
CheckResult validate_cover(const IntervalCover& c, const PassageOracle& oracle);

nlohmann::json to_json(const IntervalCover& c);
IntervalCover cover_from_json(const nlohmann::json& j);
std::string cover_csv(const IntervalCover& c);

}  // namespace frogld
