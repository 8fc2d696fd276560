#pragma once

#include <cstdint>
#include <limits>

namespace mmblock {

/// Counter-based generator: the n-th output of stream (seed, trial, stream)
/// is a fixed bijective mix of key + n * gamma (SplitMix64 finalizer), so
/// any stream can be positioned without generating its predecessors.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream)
        : key_(derive_key(seed, trial, stream)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * kGamma); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(operator()() >> 11) * 0x1.0p-53; }

    std::uint64_t counter() const { return counter_; }

    static constexpr std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t trial,
                                              std::uint64_t stream)
    {
        std::uint64_t k = mix(seed + kGamma);
        k = mix(k ^ (trial * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
        k = mix(k ^ (stream * 0xAEF17502108EF2D9ULL + 0x2545F4914F6CDD1DULL));
        return k;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace mmblock
