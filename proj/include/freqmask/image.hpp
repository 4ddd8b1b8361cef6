#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "freqmask/rng.hpp"

namespace freqmask {

/// Unconstrained real-valued H x W x C raster, row-major, channel-interleaved.
/// Used for intermediate results (unclamped inverse transforms, power spectra).
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  std::vector<double> data;

  Raster() = default;
  Raster(std::size_t w, std::size_t h, std::size_t c, double fill = 0.0)
      : width(w), height(h), channels(c), data(w * h * c, fill) {}

  std::size_t index(std::size_t y, std::size_t x, std::size_t c) const noexcept {
    return (y * width + x) * channels + c;
  }
  double& at(std::size_t y, std::size_t x, std::size_t c) noexcept { return data[index(y, x, c)]; }
  double at(std::size_t y, std::size_t x, std::size_t c) const noexcept { return data[index(y, x, c)]; }
};

/// Image with pixel values in [0, 1]; 1 (gray) or 3 (RGB) channels.
///
/// Construction clamps every value into [0, 1] and rejects non-finite
/// values, so a live ImageBuffer always satisfies its invariants.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(std::size_t width, std::size_t height, std::size_t channels, double fill = 0.0);
  ImageBuffer(std::size_t width, std::size_t height, std::size_t channels, std::vector<double> data);

  /// Clamps a raster into an image.
  static ImageBuffer from_raster(const Raster& raster);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return width_ * height_; }
  bool empty() const noexcept { return data_.empty(); }

  const std::vector<double>& data() const noexcept { return data_; }

  double at(std::size_t y, std::size_t x, std::size_t c) const noexcept {
    return data_[(y * width_ + x) * channels_ + c];
  }
  /// Writes a clamped value.
  void set(std::size_t y, std::size_t x, std::size_t c, double v);

  Raster to_raster() const;

  /// Channel-mean grayscale raster (H x W x 1).
  Raster grayscale() const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ImageNotFoundError : public ImageIoError {
 public:
  using ImageIoError::ImageIoError;
};
class UnsupportedFormatError : public ImageIoError {
 public:
  using ImageIoError::ImageIoError;
};
class CorruptImageError : public ImageIoError {
 public:
  using ImageIoError::ImageIoError;
};
class ImageWriteError : public ImageIoError {
 public:
  using ImageIoError::ImageIoError;
};

enum class ImageFormat { png, jpeg };

/// Decodes PNG or JPEG (detected from the file signature). 8-bit value v maps to v/255.
ImageBuffer load_image(const std::filesystem::path& path);

/// PNG is lossless at 8-bit quantization (round-half-up of v*255).
void save_image(const ImageBuffer& image, const std::filesystem::path& path, ImageFormat format = ImageFormat::png,
                int quality = 95);

std::vector<unsigned char> encode_png(const ImageBuffer& image);
std::vector<unsigned char> encode_jpeg(const ImageBuffer& image, int quality);
ImageBuffer decode_image(const std::vector<unsigned char>& bytes);

/// round-half-up of v*255
unsigned char quantize_8bit(double v) noexcept;

/// Normalized Gaussian weights for offsets -radius..radius, radius = ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with clamp-to-edge borders. Throws std::invalid_argument for sigma <= 0.
ImageBuffer gaussian_blur(const ImageBuffer& image, double sigma);

/// Encode/decode roundtrip through the JPEG codec at the given quality (1..100).
ImageBuffer jpeg_compress(const ImageBuffer& image, int quality);

struct AugmentSettings {
  double blur_prob = 0.1;
  double jpeg_prob = 0.1;
  std::pair<double, double> sigma_range{0.0, 3.0};
  std::pair<int, int> quality_range{30, 100};

  /// Throws std::invalid_argument on out-of-range probabilities or inverted ranges.
  void validate() const;
};

/// Which augmentations a draw selected. sigma == 0 is a zero-width blur and is skipped.
struct AugmentPlan {
  std::optional<double> blur_sigma;
  std::optional<int> jpeg_quality;
};

AugmentPlan plan_augment(RandomStream& rng, const AugmentSettings& settings);
ImageBuffer apply_augment(const ImageBuffer& image, const AugmentPlan& plan);

/// Blur with probability blur_prob, then independently JPEG with probability jpeg_prob.
ImageBuffer augment(const ImageBuffer& image, RandomStream& rng, const AugmentSettings& settings);

}  // namespace freqmask
