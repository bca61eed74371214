#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sublin {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based generator keyed by (seed, stream, path). Each draw is a
// pure function of (key, step, slot), so a path's values are identical
// under any traversal order or thread schedule, and a shorter run is a
// bit-exact prefix of a longer one.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t path)
        : base_(mix64(mix64(mix64(seed) ^ stream) ^ (path * 0x9e3779b97f4a7c15ULL))) {}

    [[nodiscard]] std::uint64_t bits(std::uint64_t step, std::uint32_t slot = 0) const {
        return mix64(base_ ^ (step * 2654435761ULL + slot));
    }

    // Uniform on (0,1), never returning an endpoint.
    [[nodiscard]] double uniform(std::uint64_t step, std::uint32_t slot = 0) const {
        return (static_cast<double>(bits(step, slot) >> 11) + 0.5) * 0x1p-53;
    }

    // Standard normal via Box-Muller; two slots per step are consumed.
    [[nodiscard]] double normal(std::uint64_t step, std::uint32_t slot = 0) const {
        const double u1 = uniform(step, slot);
        const double u2 = uniform(step, slot + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    std::uint64_t base_;
};

}  // namespace sublin
