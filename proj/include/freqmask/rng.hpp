#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace freqmask {

/// Seedable xoshiro256** stream. Seeding and substream derivation go through
/// splitmix64, so a substream is a pure function of (seed, key) and never of
/// how many values the parent has produced.
///
/// A stream is single-owner; derive substreams before handing work to other
/// threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  /// Raw 64-bit output.
  std::uint64_t next_u64() noexcept;

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform_real() noexcept;

  /// Uniform integer in the closed range [lo, hi]. Throws std::invalid_argument if lo > hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Standard normal via Box-Muller (one variate per call).
  double normal() noexcept;

  RandomStream derive_substream(std::uint64_t key) const noexcept;
  RandomStream derive_substream(std::initializer_list<std::uint64_t> keys) const noexcept;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// k distinct indices in [0, n), uniform over all size-k subsets.
/// Partial Fisher-Yates for k <= n/2, complement sampling otherwise
/// (in which case the indices come back ascending).
std::vector<std::size_t> sample_without_replacement(RandomStream& stream, std::size_t n, std::size_t k);

/// Uniformly random permutation of 0..n-1.
std::vector<std::size_t> random_permutation(RandomStream& stream, std::size_t n);

}  // namespace freqmask
