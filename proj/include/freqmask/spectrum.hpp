#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "freqmask/fft.hpp"
#include "freqmask/image.hpp"

namespace freqmask {

/// H x W x C complex frequency raster in unshifted layout: DC at (0, 0).
/// Row index u runs over the H axis and column index v over the W axis.
struct Spectrum {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  std::vector<Complex> coeffs;

  Spectrum() = default;
  Spectrum(std::size_t w, std::size_t h, std::size_t c) : width(w), height(h), channels(c), coeffs(w * h * c) {}

  std::size_t index(std::size_t u, std::size_t v, std::size_t c) const noexcept {
    return (u * width + v) * channels + c;
  }
  Complex& at(std::size_t u, std::size_t v, std::size_t c) noexcept { return coeffs[index(u, v, c)]; }
  const Complex& at(std::size_t u, std::size_t v, std::size_t c) const noexcept { return coeffs[index(u, v, c)]; }
};

/// Row/column plan pair for a fixed H x W. Immutable and shareable.
class Fft2Plan {
 public:
  Fft2Plan(std::size_t height, std::size_t width);

  std::size_t height() const noexcept { return rows_.size(); }
  std::size_t width() const noexcept { return cols_.size(); }

  /// In-place transform of one channel plane stored row-major with the given
  /// element stride (the channel count of an interleaved buffer).
  void forward(Complex* plane, std::size_t stride) const;
  void inverse(Complex* plane, std::size_t stride) const;

 private:
  void transform(Complex* plane, std::size_t stride, bool inverse) const;

  FftPlan rows_;  // length H, transforms along columns
  FftPlan cols_;  // length W, transforms along rows
};

/// Per-channel unnormalized 2D DFT.
Spectrum fft2(const ImageBuffer& image);
Spectrum fft2(const Raster& raster);

/// Inverse transform scaled by 1/(HW), real part, no clamping.
Raster ifft2_real(const Spectrum& spectrum);

/// Inverse transform scaled by 1/(HW); real part clamped into [0, 1].
ImageBuffer ifft2(const Spectrum& spectrum);

/// Per-bin |F(u,v)|^2.
Raster power_spectrum(const Spectrum& spectrum);

/// Index of the conjugate-symmetric partner ((H-u) mod H, (W-v) mod W).
inline std::pair<std::size_t, std::size_t> hermitian_partner(std::size_t u, std::size_t v, std::size_t height,
                                                             std::size_t width) noexcept {
  return {(height - u) % height, (width - v) % width};
}

/// Signed wraparound frequency of bin index k on an n-point axis.
inline double wrapped_frequency(std::size_t k, std::size_t n) noexcept {
  return k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
}

}  // namespace freqmask
