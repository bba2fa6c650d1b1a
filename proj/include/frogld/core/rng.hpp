#pragma once

#include <cstdint>

namespace frogld {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a) {
    return mix64(seed ^ mix64(a + 0x9e3779b97f4a7c15ULL));
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return stream_key(stream_key(seed, a), b);
}

// Block j of a counter-based stream; bit k is the (64j+k)-th fair coin.
constexpr std::uint64_t stream_word(std::uint64_t key, std::uint64_t block) {
    return mix64(key + (block + 1) * 0xd1b54a32d192ed03ULL);
}

}  // namespace frogld
