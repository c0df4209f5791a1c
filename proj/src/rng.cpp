#include "erwlab/rng.hpp"

namespace erwlab {

namespace {
__extension__ typedef unsigned __int128 u128;
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : seed_(master_seed), stream_(stream_index) {
  // Hash the stream index first so that neighbouring (seed, index) pairs do
  // not start from neighbouring SplitMix64 counters.
  std::uint64_t idx = stream_index ^ 0x6a09e667f3bcc909ULL;
  std::uint64_t sm = master_seed ^ splitmix64(idx);
  splitmix64(sm);
  for (auto& word : state_) word = splitmix64(sm);
  // All-zero state is the single fixed point of xoshiro.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::below(std::uint64_t bound) noexcept {
  u128 m = static_cast<u128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<u128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace erwlab
