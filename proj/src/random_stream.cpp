#include "progbayes/random_stream.hpp"

#include "progbayes/special_functions.hpp"

namespace progbayes {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;  // golden-ratio increment
}

std::uint64_t mix64(std::uint64_t z) noexcept {
    // SplitMix64 finalizer.
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t word) noexcept {
    return mix64(h ^ (word + kGamma + (h << 6) + (h >> 2)));
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index) noexcept
    : seed_(seed), stream_(stream_index) {
    // Two mixing rounds decorrelate neighbouring (seed, stream) pairs.
    base_ = mix64(mix64(seed + kGamma) ^ (stream_index * kGamma + 0x7F4A7C1593D0B312ull));
}

std::uint64_t RandomStream::next_u64() noexcept {
    ++position_;
    return mix64(base_ + position_ * kGamma);
}

double RandomStream::next_uniform() noexcept {
    // 53-bit mantissa, offset by half a step so 0 and 1 are unreachable.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() { return normal_quantile(next_uniform()); }

std::uint64_t RandomStream::next_below(std::uint64_t bound) noexcept {
    // Floor of uniform * bound; bias is O(bound / 2^53), negligible at trial
    // sizes, and keeps the draw count at exactly one variate per call.
    const auto v = static_cast<std::uint64_t>(next_uniform() * static_cast<double>(bound));
    return v < bound ? v : bound - 1;
}

double draw_normal(RandomStream& stream) { return stream.next_normal(); }

}  // namespace progbayes
