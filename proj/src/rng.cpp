#include "foxbench/rng.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "foxbench/error.hpp"

namespace foxbench {

namespace {

constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t root_seed, std::uint64_t stream_index) {
    return splitmix_mix(root_seed + kSplitMixGamma * (stream_index + 1));
}

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
        s += kSplitMixGamma;
        word = splitmix_mix(s);
    }
}

Rng Rng::stream(std::uint64_t root_seed, std::uint64_t stream_index) {
    return Rng(derive_stream_seed(root_seed, stream_index));
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    if (lo > hi) {
        std::ostringstream msg;
        msg << "uniform: lo " << lo << " > hi " << hi;
        throw BoundsError(msg.str());
    }
    return lo + (hi - lo) * next_unit();
}

std::uint64_t Rng::next_below(std::uint64_t n) {
    if (n == 0) throw BoundsError("next_below: n must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller: u1 in (0,1] so log never sees zero.
    const double u1 = 1.0 - next_unit();
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = rng.next_below(i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

double clip(double x, double lo, double hi) {
    if (lo > hi) {
        std::ostringstream msg;
        msg << "clip: lo " << lo << " > hi " << hi;
        throw BoundsError(msg.str());
    }
    if (x < lo) return lo;
    if (x > hi) return hi;
    return x;
}

}  // namespace foxbench
