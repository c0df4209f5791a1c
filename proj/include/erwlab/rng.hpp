#pragma once

#include <cstdint>
#include <string_view>

namespace erwlab {

/// Deterministic per-replica random stream.
///
/// Generator: xoshiro256** (period 2^256 - 1). The 256-bit state is filled by
/// a SplitMix64 sequence whose starting point mixes the master seed with the
/// stream index, so (seed, index) alone fixes the whole output sequence.
class RngStream {
public:
  static constexpr std::string_view kFamily =
      "xoshiro256** seeded by SplitMix64(mix(seed, stream))";

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound), bound > 0 (Lemire's rejection method).
  std::uint64_t below(std::uint64_t bound) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  std::uint64_t seed_;
  std::uint64_t stream_;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

}  // namespace erwlab
