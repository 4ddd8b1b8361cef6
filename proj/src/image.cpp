#include "freqmask/image.hpp"

#include <algorithm>
#include <cmath>

namespace freqmask {

namespace {

void check_shape(std::size_t width, std::size_t height, std::size_t channels) {
  if (width == 0 || height == 0) throw std::invalid_argument("image dimensions must be positive");
  if (channels != 1 && channels != 3) throw std::invalid_argument("image must have 1 or 3 channels");
}

double clamp_unit(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("image values must be finite");
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, std::size_t channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  check_shape(width, height, channels);
  data_.assign(width * height * channels, clamp_unit(fill));
}

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_shape(width, height, channels);
  if (data_.size() != width * height * channels) throw std::invalid_argument("image data length mismatch");
  for (auto& v : data_) v = clamp_unit(v);
}

ImageBuffer ImageBuffer::from_raster(const Raster& raster) {
  return ImageBuffer(raster.width, raster.height, raster.channels, raster.data);
}

void ImageBuffer::set(std::size_t y, std::size_t x, std::size_t c, double v) {
  data_[(y * width_ + x) * channels_ + c] = clamp_unit(v);
}

Raster ImageBuffer::to_raster() const {
  Raster r;
  r.width = width_;
  r.height = height_;
  r.channels = channels_;
  r.data = data_;
  return r;
}

Raster ImageBuffer::grayscale() const {
  Raster g(width_, height_, 1);
  for (std::size_t p = 0; p < pixel_count(); ++p) {
    double sum = 0.0;
    for (std::size_t c = 0; c < channels_; ++c) sum += data_[p * channels_ + c];
    g.data[p] = sum / static_cast<double>(channels_);
  }
  return g;
}

unsigned char quantize_8bit(double v) noexcept {
  const double scaled = std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
  return static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0));
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("gaussian sigma must be positive");
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (auto& w : k) w /= sum;
  return k;
}

ImageBuffer gaussian_blur(const ImageBuffer& image, double sigma) {
  const auto kernel = gaussian_kernel(sigma);
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const auto w = static_cast<std::ptrdiff_t>(image.width());
  const auto h = static_cast<std::ptrdiff_t>(image.height());
  const std::size_t ch = image.channels();
  const auto& src = image.data();

  std::vector<double> tmp(src.size(), 0.0);
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
          const auto xx = std::clamp<std::ptrdiff_t>(x + k, 0, w - 1);
          acc += kernel[static_cast<std::size_t>(k + radius)] * src[static_cast<std::size_t>(y * w + xx) * ch + c];
        }
        tmp[static_cast<std::size_t>(y * w + x) * ch + c] = acc;
      }
    }
  }

  std::vector<double> out(src.size(), 0.0);
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
          const auto yy = std::clamp<std::ptrdiff_t>(y + k, 0, h - 1);
          acc += kernel[static_cast<std::size_t>(k + radius)] * tmp[static_cast<std::size_t>(yy * w + x) * ch + c];
        }
        out[static_cast<std::size_t>(y * w + x) * ch + c] = acc;
      }
    }
  }
  return ImageBuffer(image.width(), image.height(), ch, std::move(out));
}

}  // namespace freqmask
