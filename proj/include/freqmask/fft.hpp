#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace freqmask {

using Complex = std::complex<double>;

/// One-dimensional complex DFT of a fixed length.
///
/// Lengths whose prime factors are all <= 7 run a recursive mixed-radix
/// decimation-in-time transform (radix 4, 2 and a generic odd radix).
/// Anything with a larger prime factor goes through Bluestein's chirp-z
/// algorithm on a power-of-two inner plan.
///
/// A plan is immutable after construction; transform calls are reentrant.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  bool uses_bluestein() const noexcept { return static_cast<bool>(inner_); }

  /// In-place unnormalized forward transform: X[k] = sum_j x[j] exp(-2 pi i jk / n).
  void forward(std::span<Complex> data) const;
  /// In-place unnormalized inverse (positive exponent, no 1/n factor).
  void inverse(std::span<Complex> data) const;

 private:
  void mixed_radix(const Complex* in, Complex* out) const;
  void work(Complex* out, const Complex* in, std::size_t fstride, std::size_t stage) const;
  void butterfly2(Complex* out, std::size_t fstride, std::size_t m) const;
  void butterfly4(Complex* out, std::size_t fstride, std::size_t m) const;
  void butterfly_generic(Complex* out, std::size_t fstride, std::size_t p, std::size_t m) const;
  void bluestein(std::span<Complex> data) const;

  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> stages_;  // (radix, remaining length)
  std::vector<Complex> twiddles_;

  // Bluestein state
  std::shared_ptr<const FftPlan> inner_;
  std::vector<Complex> chirp_;
  std::vector<Complex> kernel_spectrum_;
};

/// Largest prime factor routed through the mixed-radix path.
inline constexpr std::size_t kMaxDirectRadix = 7;

}  // namespace freqmask
