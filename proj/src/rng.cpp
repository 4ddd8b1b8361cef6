#include "freqmask/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace freqmask {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) {
    s += 0x9E3779B97F4A7C15ULL;
    word = splitmix64(s);
  }
  // xoshiro must not start from the all-zero state
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RandomStream::next_u64() noexcept {
  const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = std::rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform_real() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

__extension__ typedef unsigned __int128 u128;

std::int64_t RandomStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == UINT64_MAX) return static_cast<std::int64_t>(next_u64());
  const std::uint64_t range = span + 1;
  // Lemire's nearly-divisionless rejection.
  u128 m = static_cast<u128>(next_u64()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<u128>(next_u64()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + static_cast<std::uint64_t>(m >> 64));
}

double RandomStream::normal() noexcept {
  const double u1 = 1.0 - uniform_real();  // (0, 1]
  const double u2 = uniform_real();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RandomStream RandomStream::derive_substream(std::uint64_t key) const noexcept {
  return RandomStream(splitmix64(seed_ ^ splitmix64(key + 0xD1B54A32D192ED03ULL)));
}

RandomStream RandomStream::derive_substream(std::initializer_list<std::uint64_t> keys) const noexcept {
  RandomStream s = *this;
  for (auto k : keys) s = s.derive_substream(k);
  return s;
}

std::vector<std::size_t> sample_without_replacement(RandomStream& stream, std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("sample_without_replacement: sample size exceeds population");
  if (k == 0) return {};

  const bool complement = k > n / 2;
  const std::size_t draws = complement ? n - k : k;

  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < draws; ++i) {
    const auto j = static_cast<std::size_t>(stream.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)));
    std::swap(pool[i], pool[j]);
  }
  if (!complement) {
    pool.resize(k);
    return pool;
  }

  std::vector<char> excluded(n, 0);
  for (std::size_t i = 0; i < draws; ++i) excluded[pool[i]] = 1;
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < n; ++i)
    if (!excluded[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> random_permutation(RandomStream& stream, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(stream.uniform_int(0, static_cast<std::int64_t>(i - 1)));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace freqmask
