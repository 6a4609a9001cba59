#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace foxbench {

// Deterministic 64-bit generator: xoshiro256++ seeded through SplitMix64.
// The same seed yields the same sample stream on every platform; the
// Gaussian transform is Box-Muller (polar angle first, cached spare), so
// normal streams are reproducible too.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Independent substream: the seed is the (index+1)-th output of a
    // SplitMix64 sequence started at root_seed.
    static Rng stream(std::uint64_t root_seed, std::uint64_t stream_index);

    std::uint64_t next_u64();

    // Uniform double in [0,1), 53 bits of mantissa.
    double next_unit();

    // Uniform in [lo,hi). Throws BoundsError if lo > hi.
    double uniform(double lo, double hi);

    // Uniform integer in [0,n), rejection sampled (no modulo bias).
    std::uint64_t next_below(std::uint64_t n);

    // Standard normal.
    double gaussian();

private:
    std::array<std::uint64_t, 4> state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// min(max(x, lo), hi). Throws BoundsError if lo > hi.
double clip(double x, double lo, double hi);

// Seed of substream `stream_index` under `root_seed` (see Rng::stream).
std::uint64_t derive_stream_seed(std::uint64_t root_seed, std::uint64_t stream_index);

// 0..n-1 in a seeded Fisher-Yates order.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

}  // namespace foxbench
