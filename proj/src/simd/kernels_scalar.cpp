#include <algorithm>
#include <cmath>

#include "frogld/simd/kernels.hpp"

namespace frogld::simd::scalar {

FrogStepOut frog_step(std::int64_t* pos, std::uint64_t* word, std::uint64_t* left, std::size_t n, std::int64_t lo0,
                      std::int64_t hi0, std::uint32_t* refill_idx) {
    FrogStepOut out{lo0, hi0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t bit = static_cast<std::int64_t>(word[i] & 1u);
        pos[i] += 2 * bit - 1;
        word[i] >>= 1;
        left[i] -= 1;
        out.lo = std::min(out.lo, pos[i]);
        out.hi = std::max(out.hi, pos[i]);
        if (left[i] == 0) refill_idx[out.refills++] = static_cast<std::uint32_t>(i);
    }
    return out;
}

double image_sum(const double* q, const double* v, std::size_t n, double p, double L, double sigma) {
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double k = 0.0;
        for (int m = 0; m <= 1; ++m) {
            const double qm = q[i] + 2.0 * m * L;
            const double u = qm - p;
            k += std::exp(-u * u * inv2s2) * -std::expm1(-4.0 * p * qm * inv2s2);
        }
        // q - 2L < 0: the pair as a plain difference, no overflow
        const double u1 = q[i] - 2.0 * L - p, u2 = q[i] - 2.0 * L + p;
        k += std::exp(-u1 * u1 * inv2s2) - std::exp(-u2 * u2 * inv2s2);
        acc += v[i] * k;
    }
    return acc * norm;
}

void exp_array(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

}  // namespace frogld::simd::scalar
