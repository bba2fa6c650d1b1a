#include <atomic>
#include <cstdlib>
#include <cstring>

#include "frogld/simd/kernels.hpp"

namespace frogld::simd {

namespace {
std::atomic<int> g_forced{-1};
}

const char* level_name(Level l) { return l == Level::avx2 ? "avx2" : "scalar"; }

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Level active_level() {
    const int f = g_forced.load();
    if (f >= 0) return static_cast<Level>(f);
    static const Level detected = [] {
        const char* env = std::getenv("FROGLD_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return Level::scalar;
        return cpu_has_avx2() ? Level::avx2 : Level::scalar;
    }();
    return detected;
}

void force_level(std::optional<Level> l) {
    if (l && *l == Level::avx2 && !cpu_has_avx2()) l = Level::scalar;
    g_forced.store(l ? static_cast<int>(*l) : -1);
}

FrogStepFn frog_step_fn(Level l) { return l == Level::avx2 ? &avx2::frog_step : &scalar::frog_step; }
ImageSumFn image_sum_fn(Level l) { return l == Level::avx2 ? &avx2::image_sum : &scalar::image_sum; }
ExpFn exp_fn(Level l) { return l == Level::avx2 ? &avx2::exp_array : &scalar::exp_array; }

}  // namespace frogld::simd
