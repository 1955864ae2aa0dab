#pragma once

#include <cstdint>

namespace progbayes {

/// Deterministic, splittable random stream. A stream is identified by a
/// (seed, stream_index) pair; the k-th variate is a pure function of
/// (seed, stream_index, k), so identical pairs reproduce identical sequences
/// on every platform and distinct stream indexes give statistically
/// independent substreams. Value semantics; never shared between workers.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream_index = 0) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_index() const noexcept { return stream_; }
    /// Count of variates drawn so far.
    std::uint64_t position() const noexcept { return position_; }

    /// Next raw 64-bit value.
    std::uint64_t next_u64() noexcept;

    /// Uniform variate strictly inside (0, 1): (k + 0.5) / 2^53.
    double next_uniform() noexcept;

    /// Standard normal variate by inverse transform through normal_quantile.
    double next_normal();

    /// Uniform integer in [0, bound), bound >= 1.
    std::uint64_t next_below(std::uint64_t bound) noexcept;

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t base_;
    std::uint64_t position_ = 0;
};

/// Free-function form of RandomStream::next_normal.
double draw_normal(RandomStream& stream);

/// 64-bit mixing used for stream derivation and cell-seed hashing.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Order-dependent combine for hashing heterogeneous words into a seed.
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t word) noexcept;

}  // namespace progbayes
