#include "freqmask/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace freqmask {

namespace {

std::vector<std::pair<std::size_t, std::size_t>> factorize(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> stages;
  std::size_t p = 4;
  while (n > 1) {
    while (n % p != 0) {
      if (p == 4) p = 2;
      else if (p == 2) p = 3;
      else p += 2;
      if (p * p > n) p = n;
    }
    n /= p;
    stages.emplace_back(p, n);
  }
  return stages;
}

std::size_t largest_prime_factor(std::size_t n) {
  std::size_t largest = 1;
  for (std::size_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      largest = p;
      n /= p;
    }
  }
  return std::max(largest, n);
}

Complex unit_phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("FFT length must be positive");
  if (n == 1) return;

  if (largest_prime_factor(n) <= kMaxDirectRadix) {
    stages_ = factorize(n);
    twiddles_.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      twiddles_[k] = unit_phase(-2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    return;
  }

  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  inner_ = std::make_shared<const FftPlan>(m);

  // exp(-i pi k^2 / n); reduce k^2 mod 2n to keep the angle small
  chirp_.resize(n);
  const std::size_t two_n = 2 * n;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k2 = (k * k) % two_n;
    chirp_[k] = unit_phase(-std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n));
  }
  kernel_spectrum_.assign(m, Complex{});
  kernel_spectrum_[0] = std::conj(chirp_[0]);
  for (std::size_t k = 1; k < n; ++k) {
    kernel_spectrum_[k] = std::conj(chirp_[k]);
    kernel_spectrum_[m - k] = std::conj(chirp_[k]);
  }
  inner_->forward(kernel_spectrum_);
  const double scale = 1.0 / static_cast<double>(m);
  for (auto& v : kernel_spectrum_) v *= scale;
}

void FftPlan::forward(std::span<Complex> data) const {
  if (data.size() != n_) throw std::invalid_argument("FFT buffer length does not match plan");
  if (n_ == 1) return;
  if (inner_) {
    bluestein(data);
    return;
  }
  const std::vector<Complex> in(data.begin(), data.end());
  mixed_radix(in.data(), data.data());
}

void FftPlan::inverse(std::span<Complex> data) const {
  for (auto& v : data) v = std::conj(v);
  forward(data);
  for (auto& v : data) v = std::conj(v);
}

void FftPlan::mixed_radix(const Complex* in, Complex* out) const { work(out, in, 1, 0); }

void FftPlan::work(Complex* out, const Complex* in, std::size_t fstride, std::size_t stage) const {
  const auto [p, m] = stages_[stage];
  Complex* const begin = out;
  Complex* const end = out + p * m;
  if (m == 1) {
    for (Complex* o = out; o != end; ++o, in += fstride) *o = *in;
  } else {
    for (Complex* o = out; o != end; o += m, in += fstride) work(o, in, fstride * p, stage + 1);
  }
  switch (p) {
    case 2: butterfly2(begin, fstride, m); break;
    case 4: butterfly4(begin, fstride, m); break;
    default: butterfly_generic(begin, fstride, p, m); break;
  }
}

void FftPlan::butterfly2(Complex* out, std::size_t fstride, std::size_t m) const {
  for (std::size_t k = 0; k < m; ++k) {
    const Complex t = out[k + m] * twiddles_[k * fstride];
    out[k + m] = out[k] - t;
    out[k] += t;
  }
}

void FftPlan::butterfly4(Complex* out, std::size_t fstride, std::size_t m) const {
  for (std::size_t k = 0; k < m; ++k) {
    const Complex s0 = out[k + m] * twiddles_[k * fstride];
    const Complex s1 = out[k + 2 * m] * twiddles_[2 * k * fstride];
    const Complex s2 = out[k + 3 * m] * twiddles_[3 * k * fstride];
    const Complex s5 = out[k] - s1;
    out[k] += s1;
    const Complex s3 = s0 + s2;
    const Complex s4 = s0 - s2;
    out[k + 2 * m] = out[k] - s3;
    out[k] += s3;
    out[k + m] = {s5.real() + s4.imag(), s5.imag() - s4.real()};
    out[k + 3 * m] = {s5.real() - s4.imag(), s5.imag() + s4.real()};
  }
}

void FftPlan::butterfly_generic(Complex* out, std::size_t fstride, std::size_t p, std::size_t m) const {
  std::vector<Complex> scratch(p);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t q = 0; q < p; ++q) scratch[q] = out[u + q * m];
    for (std::size_t q = 0; q < p; ++q) {
      const std::size_t k = u + q * m;
      Complex acc = scratch[0];
      std::size_t tw = 0;
      for (std::size_t j = 1; j < p; ++j) {
        tw += fstride * k;
        if (tw >= n_) tw %= n_;
        acc += scratch[j] * twiddles_[tw];
      }
      out[k] = acc;
    }
  }
}

void FftPlan::bluestein(std::span<Complex> data) const {
  const std::size_t m = inner_->size();
  std::vector<Complex> a(m, Complex{});
  for (std::size_t k = 0; k < n_; ++k) a[k] = data[k] * chirp_[k];
  inner_->forward(a);
  for (std::size_t k = 0; k < m; ++k) a[k] *= kernel_spectrum_[k];
  inner_->inverse(a);
  for (std::size_t k = 0; k < n_; ++k) data[k] = a[k] * chirp_[k];
}

}  // namespace freqmask
