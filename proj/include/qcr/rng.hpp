#pragma once

#include <cstdint>

namespace qcr {

/// SplitMix64 output mixer.
inline std::uint64_t splitmix64_finalize(std::uint64_t x) {
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Deterministic per-shot PRNG stream. The state is the only mutable
/// field; `draws` counts how many values were consumed, which lets tests
/// assert that sampled and pinned executions stay aligned.
struct RngStream {
    std::uint64_t state = 0;
    std::uint64_t draws = 0;

    friend bool operator==(const RngStream&, const RngStream&) = default;
};

inline std::uint64_t rng_next_u64(RngStream& rng) {
    rng.state += 0x9E3779B97F4A7C15ull;
    ++rng.draws;
    return splitmix64_finalize(rng.state);
}

/// Uniform draw in [0, 1) with 53 bits of mantissa.
inline double rng_next_unit(RngStream& rng) {
    return static_cast<double>(rng_next_u64(rng) >> 11) * 0x1.0p-53;
}

/// Shot seeds are derived, not drawn, so any shot can be replayed in
/// isolation without executing its predecessors.
inline std::uint64_t derive_shot_seed(std::uint64_t master_seed, std::uint64_t shot_index) {
    return splitmix64_finalize(master_seed + shot_index + 1);
}

}  // namespace qcr
