#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace soundcil {

inline constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr uint64_t kFnvPrime = 0x00000100000001b3ull;

inline uint64_t fnv1a64(const void* bytes, size_t n, uint64_t seed = kFnvOffset) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    uint64_t h = seed;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t seed = kFnvOffset) {
    return fnv1a64(s.data(), s.size(), seed);
}

}  // namespace soundcil
