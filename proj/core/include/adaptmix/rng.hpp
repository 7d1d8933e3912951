#pragma once

#include <cstdint>
#include <vector>

namespace adaptmix {

// splitmix64: tiny, well-mixed 64-bit generator. Used instead of <random>
// engines + distributions because shuffles and samples must be byte-identical
// across platforms and standard-library implementations.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Unbiased draw from [0, bound) via rejection sampling.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % bound;
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

// Fisher-Yates with our own generator; std::shuffle's output is
// implementation-defined and would break cross-platform reproducibility.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

// Stable derivation of substream seeds (e.g. per shuffle pass).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 rng(seed ^ (0xA0761D6478BD642FULL + stream * 0xE7037ED1A0B428DBULL));
    return rng.next();
}

}  // namespace adaptmix
