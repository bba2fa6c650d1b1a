#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "frogld/simd/kernels.hpp"

namespace frogld::simd::avx2 {

namespace {

// exp via x = k ln2 + r, |r| <= ln2/2, degree-13 Taylor in r.
inline __m256d vexp(__m256d x) {
    const __m256d hi = _mm256_set1_pd(709.0);
    const __m256d lo = _mm256_set1_pd(-708.0);
    const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
    const __m256d ln2hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2lo = _mm256_set1_pd(1.42860682030941723212e-6);
    __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, ln2hi, x);
    r = _mm256_fnmadd_pd(k, ln2lo, r);
    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    // scale by 2^k in two halves so k = 1024 does not overflow the exponent
    const __m128i ki = _mm256_cvtpd_epi32(k);
    const __m128i k1 = _mm_srai_epi32(ki, 1);
    const __m128i k2 = _mm_sub_epi32(ki, k1);
    auto pow2 = [](__m128i e) {
        const __m256i e64 = _mm256_cvtepi32_epi64(e);
        return _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(e64, _mm256_set1_epi64x(1023)), 52));
    };
    p = _mm256_mul_pd(_mm256_mul_pd(p, pow2(k1)), pow2(k2));
    return _mm256_andnot_pd(underflow, p);
}

// expm1: Taylor series for |x| < 0.5, exp(x) - 1 otherwise.
inline __m256d vexpm1(__m256d x) {
    const __m256d absx = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
    const __m256d small = _mm256_cmp_pd(absx, _mm256_set1_pd(0.5), _CMP_LT_OQ);
    __m256d p = _mm256_set1_pd(1.0 / 1307674368000.0);
    static const double inv_fact[] = {1.0 / 87178291200.0, 1.0 / 6227020800.0, 1.0 / 479001600.0,
                                      1.0 / 39916800.0,    1.0 / 3628800.0,    1.0 / 362880.0,
                                      1.0 / 40320.0,       1.0 / 5040.0,       1.0 / 720.0,
                                      1.0 / 120.0,         1.0 / 24.0,         1.0 / 6.0,
                                      0.5,                 1.0};
    for (double c : inv_fact) p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c));
    const __m256d series = _mm256_mul_pd(p, x);
    if (_mm256_movemask_pd(small) == 0xF) return series;
    const __m256d big = _mm256_sub_pd(vexp(x), _mm256_set1_pd(1.0));
    return _mm256_blendv_pd(big, series, small);
}

inline double hsum(__m256d v) {
    const __m128d a = _mm256_castpd256_pd128(v);
    const __m128d b = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(a, b);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

FrogStepOut frog_step(std::int64_t* pos, std::uint64_t* word, std::uint64_t* left, std::size_t n, std::int64_t lo0,
                      std::int64_t hi0, std::uint32_t* refill_idx) {
    FrogStepOut out{lo0, hi0, 0};
    __m256i vlo = _mm256_set1_epi64x(lo0);
    __m256i vhi = _mm256_set1_epi64x(hi0);
    const __m256i one = _mm256_set1_epi64x(1);
    const __m256i zero = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i p = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pos + i));
        __m256i w = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(word + i));
        __m256i l = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(left + i));
        const __m256i bit = _mm256_and_si256(w, one);
        p = _mm256_add_epi64(p, _mm256_sub_epi64(_mm256_add_epi64(bit, bit), one));
        w = _mm256_srli_epi64(w, 1);
        l = _mm256_sub_epi64(l, one);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(pos + i), p);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(word + i), w);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(left + i), l);
        vlo = _mm256_blendv_epi8(vlo, p, _mm256_cmpgt_epi64(vlo, p));
        vhi = _mm256_blendv_epi8(vhi, p, _mm256_cmpgt_epi64(p, vhi));
        int mask = _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpeq_epi64(l, zero)));
        while (mask) {
            const int b = __builtin_ctz(mask);
            refill_idx[out.refills++] = static_cast<std::uint32_t>(i + b);
            mask &= mask - 1;
        }
    }
    alignas(32) std::int64_t tl[4], th[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(tl), vlo);
    _mm256_store_si256(reinterpret_cast<__m256i*>(th), vhi);
    for (int k = 0; k < 4; ++k) {
        out.lo = std::min(out.lo, tl[k]);
        out.hi = std::max(out.hi, th[k]);
    }
    for (; i < n; ++i) {
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
    const __m256d vp = _mm256_set1_pd(p);
    const __m256d vneg_inv2s2 = _mm256_set1_pd(-inv2s2);
    const __m256d vneg4p = _mm256_set1_pd(-4.0 * p * inv2s2);
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d q0 = _mm256_loadu_pd(q + i);
        __m256d k = _mm256_setzero_pd();
        for (int m = 0; m <= 1; ++m) {
            const __m256d qm = _mm256_add_pd(q0, _mm256_set1_pd(2.0 * m * L));
            const __m256d u = _mm256_sub_pd(qm, vp);
            const __m256d g = vexp(_mm256_mul_pd(_mm256_mul_pd(u, u), vneg_inv2s2));
            const __m256d e = _mm256_xor_pd(vexpm1(_mm256_mul_pd(vneg4p, qm)), sign);
            k = _mm256_fmadd_pd(g, e, k);
        }
        const __m256d q2 = _mm256_sub_pd(q0, _mm256_set1_pd(2.0 * L));
        const __m256d u1 = _mm256_sub_pd(q2, vp), u2 = _mm256_add_pd(q2, vp);
        k = _mm256_add_pd(k, vexp(_mm256_mul_pd(_mm256_mul_pd(u1, u1), vneg_inv2s2)));
        k = _mm256_sub_pd(k, vexp(_mm256_mul_pd(_mm256_mul_pd(u2, u2), vneg_inv2s2)));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(v + i), k, acc);
    }
    double total = hsum(acc);
    if (i < n) total += scalar::image_sum(q + i, v + i, n - i, p, L, sigma) / norm;
    return total * norm;
}

void exp_array(const double* x, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, vexp(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) out[i] = std::exp(x[i]);
}

}  // namespace frogld::simd::avx2
