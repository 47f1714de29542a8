#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace soundcil {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Independent sub-streams per consumer, so optional components (AFT network
// init, reparameterized sampling, ...) never shift the draws seen by the rest
// of the run. Required for the finetune/zero-weight trajectory identity.
enum class Stream : uint64_t {
    ModelInit = 1,
    HeadInit = 2,
    AftInit = 3,
    Shuffle = 4,
    Reparam = 5,
    Split = 6,
    ClassOrder = 7,
    Synth = 8,
};

inline uint64_t derive_seed(uint64_t base, Stream stream, uint64_t salt = 0) {
    uint64_t h = splitmix64(base ^ (0x9e3779b97f4a7c15ull * (static_cast<uint64_t>(stream) + 1)));
    if (salt != 0) h = splitmix64(h ^ salt);
    return h;
}

// mt19937_64 plus hand-rolled distributions. std::normal_distribution and
// std::shuffle are implementation-defined, which would break byte-level
// reproducibility of runs; these are pinned algorithms.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    std::mt19937_64& engine() { return eng_; }

    // [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller, one value per call.
    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // [0, n), rejection-sampled to stay unbiased.
    uint64_t uniform_int(uint64_t n) {
        if (n == 0) return 0;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace soundcil
