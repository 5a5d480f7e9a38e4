#pragma once

#include <cstdint>

namespace sphrecon {

/// SplitMix64 finalizer. Stateless, so draw i of stream s is mix(s, i) on
/// every platform.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Counter-based generator: the value at `counter` depends only on (seed, counter).
class CounterRng {
public:
    constexpr explicit CounterRng(std::uint64_t seed) : key_(splitmix64(seed)) {}

    constexpr std::uint64_t bits(std::uint64_t counter) const {
        return splitmix64(key_ ^ splitmix64(counter));
    }
    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
};

/// Derives an independent seed for a named sub-stream.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x5851F42D4C957F2Dull));
}

}  // namespace sphrecon
