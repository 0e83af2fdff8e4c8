#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace morphcloud {

// splitmix64: tiny, fast, deterministic across platforms. Used everywhere a seeded
// choice is needed (shuffles, RANSAC sampling, synthetic test data) so results do not
// depend on a standard library's unspecified engine/distribution internals.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n), unbiased via rejection
    uint64_t next_below(uint64_t n) {
        uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // uniform double in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // standard normal, Box-Muller (second value of the pair intentionally dropped)
    double next_gaussian() {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    uint64_t state_;
};

// Fisher-Yates with our own rng so the permutation is platform-stable.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, SplitMix64& rng) {
    for (size_t i = v.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace morphcloud
