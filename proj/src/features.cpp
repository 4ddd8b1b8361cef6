#include <algorithm>
#include <cmath>

#include "freqmask/detector.hpp"
#include "freqmask/spectrum.hpp"

namespace freqmask {

std::size_t annulus_of(std::size_t u, std::size_t v, std::size_t height, std::size_t width, std::size_t bins) {
  const double r_max = std::hypot(static_cast<double>(height / 2), static_cast<double>(width / 2));
  const double d = std::hypot(wrapped_frequency(u, height), wrapped_frequency(v, width));
  if (d == 0.0 || r_max == 0.0) return 0;
  const auto k = static_cast<std::size_t>(std::ceil(d * static_cast<double>(bins) / r_max));
  return std::clamp<std::size_t>(k, 1, bins);
}

std::vector<double> extract_features(const Raster& gray, std::size_t bins) {
  if (gray.channels != 1) throw std::invalid_argument("extract_features expects a single-channel raster");
  if (bins == 0) throw std::invalid_argument("feature bin count must be positive");
  const std::size_t h = gray.height;
  const std::size_t w = gray.width;
  const Raster power = power_spectrum(fft2(gray));

  std::vector<double> sums(bins + 1, 0.0);
  std::vector<std::size_t> counts(bins + 1, 0);
  for (std::size_t u = 0; u < h; ++u) {
    for (std::size_t v = 0; v < w; ++v) {
      const std::size_t k = annulus_of(u, v, h, w, bins);
      sums[k] += power.at(u, v, 0);
      ++counts[k];
    }
  }

  std::vector<double> features(bins + 1, 0.0);
  for (std::size_t k = 1; k <= bins; ++k)
    features[k - 1] = counts[k] ? std::log1p(sums[k] / static_cast<double>(counts[k])) : 0.0;

  if (h >= 4 && w >= 4) {
    auto energy = [&](const BandRegion& r) {
      double e = 0.0;
      for (std::size_t u = r.u_start; u < r.u_end; ++u)
        for (std::size_t v = r.v_start; v < r.v_end; ++v)
          if (u != 0 || v != 0) e += power.at(u, v, 0);
      return e;
    };
    const double high = energy(band_region(Band::high, h, w));
    const double low = energy(band_region(Band::low, h, w));
    features[bins] = std::log((high + kBandRatioEpsilon) / (low + kBandRatioEpsilon));
  }
  return features;
}

std::vector<double> extract_features(const ImageBuffer& image, std::size_t bins) {
  return extract_features(image.grayscale(), bins);
}

}  // namespace freqmask
