#include "freqmask/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace freqmask {

Fft2Plan::Fft2Plan(std::size_t height, std::size_t width) : rows_(height), cols_(width) {}

void Fft2Plan::forward(Complex* plane, std::size_t stride) const { transform(plane, stride, false); }
void Fft2Plan::inverse(Complex* plane, std::size_t stride) const { transform(plane, stride, true); }

void Fft2Plan::transform(Complex* plane, std::size_t stride, bool inverse) const {
  const std::size_t h = height();
  const std::size_t w = width();

  std::vector<Complex> line(w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) line[x] = plane[(y * w + x) * stride];
    inverse ? cols_.inverse(line) : cols_.forward(line);
    for (std::size_t x = 0; x < w; ++x) plane[(y * w + x) * stride] = line[x];
  }

  line.resize(h);
  for (std::size_t x = 0; x < w; ++x) {
    for (std::size_t y = 0; y < h; ++y) line[y] = plane[(y * w + x) * stride];
    inverse ? rows_.inverse(line) : rows_.forward(line);
    for (std::size_t y = 0; y < h; ++y) plane[(y * w + x) * stride] = line[y];
  }
}

Spectrum fft2(const Raster& raster) {
  if (raster.width == 0 || raster.height == 0 || raster.channels == 0)
    throw std::invalid_argument("fft2: empty raster");
  Spectrum s(raster.width, raster.height, raster.channels);
  for (std::size_t i = 0; i < raster.data.size(); ++i) s.coeffs[i] = raster.data[i];
  const Fft2Plan plan(raster.height, raster.width);
  for (std::size_t c = 0; c < raster.channels; ++c) plan.forward(s.coeffs.data() + c, raster.channels);
  return s;
}

Spectrum fft2(const ImageBuffer& image) { return fft2(image.to_raster()); }

Raster ifft2_real(const Spectrum& spectrum) {
  if (spectrum.width == 0 || spectrum.height == 0 || spectrum.channels == 0)
    throw std::invalid_argument("ifft2: empty spectrum");
  std::vector<Complex> work = spectrum.coeffs;
  const Fft2Plan plan(spectrum.height, spectrum.width);
  for (std::size_t c = 0; c < spectrum.channels; ++c) plan.inverse(work.data() + c, spectrum.channels);

  Raster out(spectrum.width, spectrum.height, spectrum.channels);
  const double scale = 1.0 / static_cast<double>(spectrum.width * spectrum.height);
  for (std::size_t i = 0; i < work.size(); ++i) out.data[i] = work[i].real() * scale;
  return out;
}

ImageBuffer ifft2(const Spectrum& spectrum) { return ImageBuffer::from_raster(ifft2_real(spectrum)); }

Raster power_spectrum(const Spectrum& spectrum) {
  Raster p(spectrum.width, spectrum.height, spectrum.channels);
  for (std::size_t i = 0; i < spectrum.coeffs.size(); ++i) p.data[i] = std::norm(spectrum.coeffs[i]);
  return p;
}

}  // namespace freqmask
