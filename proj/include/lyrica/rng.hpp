#ifndef LYRICA_RNG_HPP
#define LYRICA_RNG_HPP

#include <cstdint>
#include <vector>

namespace lyrica {

// SplitMix64 generator. Used everywhere randomness is needed so that results
// are reproducible across platforms and standard-library versions
// (std::shuffle and std::uniform_int_distribution are implementation
// defined, which would break byte-identical outputs).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

private:
    std::uint64_t state_;
};

// Derives an independent stream seed from (seed, stream index). Streams with
// distinct indices behave as unrelated generators, so per-tree / per-class /
// per-epoch work can run in any order (or in parallel) without changing
// results.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    Rng mix(seed ^ (0xA0761D6478BD642FULL * (stream + 1)));
    return mix.next_u64();
}

// Fisher-Yates shuffle driven by Rng; deterministic for a given seed.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace lyrica

#endif
