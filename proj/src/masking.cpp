#include "freqmask/masking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "freqmask/spectrum.hpp"

namespace freqmask {

namespace {

thread_local std::uint64_t g_mask_invocations = 0;

void require_kind(const MaskSpec& spec, bool ok, const char* op) {
  if (!ok) throw std::invalid_argument(std::string(op) + ": mask kind '" + std::string(to_string(spec.kind)) + "' not supported");
}

}  // namespace

std::string_view to_string(MaskKind kind) noexcept {
  switch (kind) {
    case MaskKind::pixel: return "pixel";
    case MaskKind::patch: return "patch";
    case MaskKind::frequency: return "frequency";
  }
  return "?";
}

std::string_view to_string(Band band) noexcept {
  switch (band) {
    case Band::low: return "low";
    case Band::mid: return "mid";
    case Band::high: return "high";
    case Band::all: return "all";
  }
  return "?";
}

MaskKind parse_mask_kind(std::string_view text) {
  if (text == "pixel") return MaskKind::pixel;
  if (text == "patch") return MaskKind::patch;
  if (text == "frequency") return MaskKind::frequency;
  throw std::invalid_argument("unknown mask kind: " + std::string(text));
}

Band parse_band(std::string_view text) {
  if (text == "low") return Band::low;
  if (text == "mid") return Band::mid;
  if (text == "high") return Band::high;
  if (text == "all") return Band::all;
  throw std::invalid_argument("unknown frequency band: " + std::string(text));
}

void MaskSpec::validate() const {
  if (!std::isfinite(ratio) || ratio < 0.0 || ratio > 1.0) throw std::invalid_argument("mask ratio must lie in [0,1]");
  if (kind == MaskKind::patch && patch_size == 0) throw std::invalid_argument("patch size must be >= 1");
}

std::string MaskSpec::label() const {
  char buf[64];
  switch (kind) {
    case MaskKind::pixel: std::snprintf(buf, sizeof buf, "pixel-r%.2f", ratio); break;
    case MaskKind::patch: std::snprintf(buf, sizeof buf, "patch%zu-r%.2f", patch_size, ratio); break;
    case MaskKind::frequency:
      std::snprintf(buf, sizeof buf, "frequency-%s-r%.2f%s%s", std::string(to_string(band)).c_str(), ratio,
                    symmetric ? "-sym" : "", shifted ? "-shifted" : "");
      break;
  }
  return buf;
}

std::size_t ratio_count(double r, std::size_t total) {
  const double x = r * static_cast<double>(total);
  const double nearest = std::round(x);
  const double count = std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x)) ? nearest : std::ceil(x);
  return std::min(static_cast<std::size_t>(std::max(count, 0.0)), total);
}

std::size_t pixel_mask_count(std::size_t height, std::size_t width, double r) { return ratio_count(r, height * width); }

PatchCount patch_mask_count(std::size_t height, std::size_t width, std::size_t patch_size, double r) {
  if (patch_size == 0) throw std::invalid_argument("patch size must be >= 1");
  PatchCount pc;
  pc.patches = (height * width) / (patch_size * patch_size);
  pc.masked = ratio_count(r, pc.patches);
  return pc;
}

BandRegion band_region(Band band, std::size_t height, std::size_t width) {
  if (height == 0 || width == 0) throw std::invalid_argument("band_region: empty spectrum");
  if (band == Band::all) return {0, height, 0, width};
  if (height < 4 || width < 4) throw std::invalid_argument("band_region: low/mid/high bands need H, W >= 4");
  const std::size_t h1 = height / 4, h3 = 3 * height / 4;
  const std::size_t w1 = width / 4, w3 = 3 * width / 4;
  switch (band) {
    case Band::low: return {0, h1, 0, w1};
    case Band::mid: return {h1, h3, w1, w3};
    case Band::high: return {h3, height, w3, width};
    case Band::all: break;
  }
  return {0, height, 0, width};
}

std::size_t frequency_mask_count(const BandRegion& region, double r) { return ratio_count(r, region.area()); }

std::vector<Coord> select_spatial_mask(std::size_t height, std::size_t width, const MaskSpec& spec,
                                       RandomStream& stream) {
  spec.validate();
  require_kind(spec, spec.kind != MaskKind::frequency, "select_spatial_mask");

  std::vector<Coord> coords;
  if (spec.kind == MaskKind::pixel) {
    const auto picks = sample_without_replacement(stream, height * width, pixel_mask_count(height, width, spec.ratio));
    coords.reserve(picks.size());
    for (auto i : picks) coords.emplace_back(i / width, i % width);
    return coords;
  }

  const std::size_t p = spec.patch_size;
  const std::size_t rows = height / p;
  const std::size_t cols = width / p;
  if (rows == 0 || cols == 0) throw std::invalid_argument("patch size exceeds image dimensions");
  const auto picks = sample_without_replacement(stream, rows * cols, ratio_count(spec.ratio, rows * cols));
  coords.reserve(picks.size() * p * p);
  for (auto i : picks) {
    const std::size_t y0 = (i / cols) * p;
    const std::size_t x0 = (i % cols) * p;
    for (std::size_t dy = 0; dy < p; ++dy)
      for (std::size_t dx = 0; dx < p; ++dx) coords.emplace_back(y0 + dy, x0 + dx);
  }
  return coords;
}

ImageBuffer apply_spatial_mask(const ImageBuffer& image, const MaskSpec& spec, RandomStream& stream) {
  const auto coords = select_spatial_mask(image.height(), image.width(), spec, stream);
  ImageBuffer out = image;
  for (const auto& [y, x] : coords)
    for (std::size_t c = 0; c < image.channels(); ++c) out.set(y, x, c, 0.0);
  return out;
}

std::vector<Coord> select_frequency_bins(std::size_t height, std::size_t width, const MaskSpec& spec,
                                         RandomStream& stream) {
  spec.validate();
  require_kind(spec, spec.kind == MaskKind::frequency, "select_frequency_bins");
  const BandRegion region = band_region(spec.band, height, width);
  const std::size_t region_w = region.v_end - region.v_start;
  const auto picks = sample_without_replacement(stream, region.area(), frequency_mask_count(region, spec.ratio));

  std::vector<Coord> bins;
  bins.reserve(picks.size());
  for (auto i : picks) {
    std::size_t u = region.u_start + i / region_w;
    std::size_t v = region.v_start + i % region_w;
    if (spec.shifted) {
      u = (u + height - height / 2) % height;
      v = (v + width - width / 2) % width;
    }
    bins.emplace_back(u, v);
  }
  return bins;
}

FrequencyMaskResult frequency_mask_unclamped(const ImageBuffer& image, const MaskSpec& spec, RandomStream& stream) {
  FrequencyMaskResult result;
  result.bins = select_frequency_bins(image.height(), image.width(), spec, stream);
  if (result.bins.empty()) {
    result.output = image.to_raster();
    return result;
  }

  Spectrum f = fft2(image);
  for (const auto& [u, v] : result.bins) {
    const auto [pu, pv] = hermitian_partner(u, v, f.height, f.width);
    for (std::size_t c = 0; c < f.channels; ++c) {
      f.at(u, v, c) = Complex{};
      if (spec.symmetric) f.at(pu, pv, c) = Complex{};
    }
  }
  result.output = ifft2_real(f);
  return result;
}

ImageBuffer apply_frequency_mask(const ImageBuffer& image, const MaskSpec& spec, RandomStream& stream) {
  return ImageBuffer::from_raster(frequency_mask_unclamped(image, spec, stream).output);
}

ImageBuffer apply_mask(const ImageBuffer& image, const MaskSpec& spec, RandomStream& stream) {
  ++g_mask_invocations;
  return spec.kind == MaskKind::frequency ? apply_frequency_mask(image, spec, stream)
                                          : apply_spatial_mask(image, spec, stream);
}

std::uint64_t mask_invocation_count() noexcept { return g_mask_invocations; }

}  // namespace freqmask
