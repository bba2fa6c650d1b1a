#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

namespace frogld::simd {

enum class Level { scalar, avx2 };

const char* level_name(Level l);
bool cpu_has_avx2();
// Detected level unless FROGLD_SIMD=scalar or a forced level is set.
Level active_level();
void force_level(std::optional<Level> l);

struct FrogStepOut {
    std::int64_t lo;
    std::int64_t hi;
    std::size_t refills;  // indices written to refill_idx
};

// One synchronous step for n frogs.  Frog i moves +1 if the low bit of
// word[i] is set, else -1; the word is shifted and left[i] decremented.
// Frogs whose left[] drops to zero are listed in refill_idx (ascending).
// lo/hi are the min/max of the new positions folded with lo0/hi0.
using FrogStepFn = FrogStepOut (*)(std::int64_t* pos, std::uint64_t* word, std::uint64_t* left, std::size_t n,
                                   std::int64_t lo0, std::int64_t hi0, std::uint32_t* refill_idx);

// Sum_i v[i] * K(q[i]) with the paired image kernel
//   K(q) = sum_{m=-1,0,1} phi_s(q + 2mL - p) * (1 - exp(-2 p (q + 2mL) / s^2))
// where phi_s is the N(0, s^2) density.  p and q are distances from the
// pairing barrier.
using ImageSumFn = double (*)(const double* q, const double* v, std::size_t n, double p, double L, double sigma);

// out[i] = exp(x[i])
using ExpFn = void (*)(const double* x, double* out, std::size_t n);

namespace scalar {
FrogStepOut frog_step(std::int64_t*, std::uint64_t*, std::uint64_t*, std::size_t, std::int64_t, std::int64_t,
                      std::uint32_t*);
double image_sum(const double*, const double*, std::size_t, double, double, double);
void exp_array(const double*, double*, std::size_t);
}  // namespace scalar

namespace avx2 {
FrogStepOut frog_step(std::int64_t*, std::uint64_t*, std::uint64_t*, std::size_t, std::int64_t, std::int64_t,
                      std::uint32_t*);
double image_sum(const double*, const double*, std::size_t, double, double, double);
void exp_array(const double*, double*, std::size_t);
}  // namespace avx2

FrogStepFn frog_step_fn(Level l);
ImageSumFn image_sum_fn(Level l);
ExpFn exp_fn(Level l);

}  // namespace frogld::simd
