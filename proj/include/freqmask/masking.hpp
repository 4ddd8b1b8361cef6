#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freqmask/image.hpp"
#include "freqmask/rng.hpp"

namespace freqmask {

enum class MaskKind { pixel, patch, frequency };
enum class Band { low, mid, high, all };

std::string_view to_string(MaskKind kind) noexcept;
std::string_view to_string(Band band) noexcept;
MaskKind parse_mask_kind(std::string_view text);
Band parse_band(std::string_view text);

/// One masking configuration.
///
/// `patch_size` is read only for patch masking; `band`, `symmetric` and
/// `shifted` only for frequency masking. `shifted` reads the band bounds on a
/// DC-centred spectrum instead of the default unshifted layout.
struct MaskSpec {
  MaskKind kind = MaskKind::frequency;
  double ratio = 0.15;
  std::size_t patch_size = 8;
  Band band = Band::all;
  bool symmetric = false;
  bool shifted = false;

  /// Throws std::invalid_argument if ratio is outside [0,1] or a patch spec has p == 0.
  void validate() const;
  std::string label() const;

  friend bool operator==(const MaskSpec&, const MaskSpec&) = default;
};

/// Half-open rectangle of frequency bins: rows [u_start, u_end), columns [v_start, v_end).
struct BandRegion {
  std::size_t u_start = 0;
  std::size_t u_end = 0;
  std::size_t v_start = 0;
  std::size_t v_end = 0;

  std::size_t area() const noexcept { return (u_end - u_start) * (v_end - v_start); }
  friend bool operator==(const BandRegion&, const BandRegion&) = default;
};

/// ceil(r * total). Products within 1e-9 (relative) of an integer snap to that
/// integer so decimal ratios such as 0.15 * 100 count as 15, not 16.
std::size_t ratio_count(double r, std::size_t total);

/// m = ceil(r * H * W)
std::size_t pixel_mask_count(std::size_t height, std::size_t width, double r);

struct PatchCount {
  std::size_t patches = 0;  // N = floor(H*W / p^2)
  std::size_t masked = 0;   // m = ceil(r * N)
  friend bool operator==(const PatchCount&, const PatchCount&) = default;
};
PatchCount patch_mask_count(std::size_t height, std::size_t width, std::size_t patch_size, double r);

/// Band bounds on the unshifted spectrum with fractional bounds floored.
/// low/mid/high need H, W >= 4; throws std::invalid_argument otherwise.
BandRegion band_region(Band band, std::size_t height, std::size_t width);

/// N = ceil(r * area)
std::size_t frequency_mask_count(const BandRegion& region, double r);

using Coord = std::pair<std::size_t, std::size_t>;

/// Pixel coordinates (y, x) that spatial masking will zero, in draw order.
/// Patch masking tiles full p x p patches row-major from (0,0); partial edge
/// patches are never selected.
std::vector<Coord> select_spatial_mask(std::size_t height, std::size_t width, const MaskSpec& spec,
                                       RandomStream& stream);

/// Unshifted frequency bins (u, v) that frequency masking will zero, in draw
/// order, excluding the Hermitian partners added in symmetric mode.
std::vector<Coord> select_frequency_bins(std::size_t height, std::size_t width, const MaskSpec& spec,
                                         RandomStream& stream);

ImageBuffer apply_spatial_mask(const ImageBuffer& image, const MaskSpec& spec, RandomStream& stream);

struct FrequencyMaskResult {
  Raster output;              // real part of the inverse transform, unclamped
  std::vector<Coord> bins;    // selected bins (no partners)
};

/// Frequency masking without the final clamp; exposes the selected bins.
FrequencyMaskResult frequency_mask_unclamped(const ImageBuffer& image, const MaskSpec& spec, RandomStream& stream);

ImageBuffer apply_frequency_mask(const ImageBuffer& image, const MaskSpec& spec, RandomStream& stream);

/// Single entry point used by training. Increments the calling thread's
/// invocation counter.
ImageBuffer apply_mask(const ImageBuffer& image, const MaskSpec& spec, RandomStream& stream);

/// Number of apply_mask calls made on this thread so far.
std::uint64_t mask_invocation_count() noexcept;

}  // namespace freqmask
