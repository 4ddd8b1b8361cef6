#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "freqmask/masking.hpp"
#include "freqmask/spectrum.hpp"
#include "oracles.hpp"

using namespace freqmask;

namespace {

ImageBuffer random_image(std::size_t w, std::size_t h, std::size_t c, std::uint64_t seed) {
  RandomStream s(seed);
  std::vector<double> data(w * h * c);
  for (auto& v : data) v = 0.05 + 0.9 * s.uniform_real();
  return ImageBuffer(w, h, c, std::move(data));
}

MaskSpec spec_of(MaskKind kind, double r) {
  MaskSpec s;
  s.kind = kind;
  s.ratio = r;
  return s;
}

double energy(const std::vector<double>& v) {
  double e = 0.0;
  for (double x : v) e += x * x;
  return e;
}

}  // namespace

TEST_CASE("count formulas: worked examples") {
  CHECK(pixel_mask_count(4, 4, 0.5) == 8);
  CHECK(pixel_mask_count(3, 3, 0.15) == 2);
  CHECK(pixel_mask_count(17, 5, 0.0) == 0);

  CHECK(patch_mask_count(224, 224, 8, 0.15) == PatchCount{784, 118});
  CHECK(patch_mask_count(4, 4, 2, 0.5) == PatchCount{4, 2});
  CHECK(patch_mask_count(5, 5, 2, 1.0) == PatchCount{6, 6});
  CHECK_THROWS_AS(patch_mask_count(4, 4, 0, 0.5), std::invalid_argument);

  CHECK(frequency_mask_count(band_region(Band::all, 8, 8), 0.15) == 10);
  CHECK(frequency_mask_count(band_region(Band::mid, 8, 8), 0.0) == 0);
  CHECK(frequency_mask_count(band_region(Band::all, 224, 224), 0.15) == 7527);
}

TEST_CASE("band regions on 8x8") {
  CHECK(band_region(Band::all, 8, 8) == BandRegion{0, 8, 0, 8});
  CHECK(band_region(Band::low, 8, 8) == BandRegion{0, 2, 0, 2});
  CHECK(band_region(Band::mid, 8, 8) == BandRegion{2, 6, 2, 6});
  CHECK(band_region(Band::high, 8, 8) == BandRegion{6, 8, 6, 8});
  CHECK(band_region(Band::low, 8, 8).area() == 4);
  CHECK(band_region(Band::mid, 8, 8).area() == 16);
  CHECK(band_region(Band::high, 8, 8).area() == 4);
  CHECK(band_region(Band::high, 9, 7) == BandRegion{6, 9, 5, 7});
  CHECK_THROWS_AS(band_region(Band::low, 3, 8), std::invalid_argument);
  CHECK(band_region(Band::all, 3, 2).area() == 6);
}

TEST_CASE("count formulas agree with exact integer arithmetic on a grid") {
  int combos = 0;
  for (std::size_t h : {4u, 5u, 8u, 13u, 31u, 64u, 100u, 224u}) {
    for (std::size_t w : {4u, 7u, 16u, 224u}) {
      for (std::uint64_t a : {0u, 1u, 1500u, 3000u, 3333u, 5000u, 7000u, 9999u, 10000u}) {
        const double r = static_cast<double>(a) / 10000.0;
        CHECK(pixel_mask_count(h, w, r) == oracle::ceil_ratio(a, h * w));
        for (std::size_t p : {1u, 2u, 3u, 8u}) {
          const std::size_t n = (h * w) / (p * p);
          CHECK(patch_mask_count(h, w, p, r) == PatchCount{n, oracle::ceil_ratio(a, n)});
        }
        for (Band b : {Band::low, Band::mid, Band::high, Band::all}) {
          const auto reg = band_region(b, h, w);
          std::size_t u0 = 0, u1 = h, v0 = 0, v1 = w;
          if (b == Band::low) u1 = h / 4, v1 = w / 4;
          if (b == Band::mid) u0 = h / 4, u1 = 3 * h / 4, v0 = w / 4, v1 = 3 * w / 4;
          if (b == Band::high) u0 = 3 * h / 4, v0 = 3 * w / 4;
          CHECK(reg == BandRegion{u0, u1, v0, v1});
          CHECK(frequency_mask_count(reg, r) == oracle::ceil_ratio(a, (u1 - u0) * (v1 - v0)));
        }
        ++combos;
      }
    }
  }
  CHECK(combos >= 200);
}

TEST_CASE("spec validation and names") {
  MaskSpec s;
  s.ratio = 1.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.ratio = -0.1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = spec_of(MaskKind::patch, 0.2);
  s.patch_size = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  CHECK(parse_mask_kind("patch") == MaskKind::patch);
  CHECK(parse_band("mid") == Band::mid);
  CHECK(to_string(Band::high) == "high");
  CHECK_THROWS(parse_band("ultra"));
  CHECK_THROWS(parse_mask_kind("voxel"));
}

TEST_CASE("spatial masking follows the case split exactly") {
  const auto img = random_image(23, 17, 3, 4);
  for (MaskKind kind : {MaskKind::pixel, MaskKind::patch}) {
    for (double r : {0.0, 0.15, 0.5, 1.0}) {
      auto spec = spec_of(kind, r);
      spec.patch_size = 4;
      RandomStream a(9), b(9);
      const auto coords = select_spatial_mask(img.height(), img.width(), spec, a);
      const auto out = apply_spatial_mask(img, spec, b);

      std::set<Coord> masked(coords.begin(), coords.end());
      CHECK(masked.size() == coords.size());
      if (kind == MaskKind::pixel) CHECK(coords.size() == pixel_mask_count(17, 23, r));
      else CHECK(coords.size() == 16 * oracle::ceil_ratio(static_cast<std::uint64_t>(std::lround(r * 10000)), 4 * 5));

      for (std::size_t y = 0; y < 17; ++y)
        for (std::size_t x = 0; x < 23; ++x)
          for (std::size_t c = 0; c < 3; ++c) {
            if (masked.count({y, x})) CHECK(out.at(y, x, c) == 0.0);
            else CHECK(out.at(y, x, c) == img.at(y, x, c));
          }
    }
  }
}

TEST_CASE("spatial masking extremes") {
  const auto img = random_image(9, 6, 1, 5);
  RandomStream s(1);
  CHECK(apply_spatial_mask(img, spec_of(MaskKind::pixel, 0.0), s) == img);
  auto patch0 = spec_of(MaskKind::patch, 0.0);
  patch0.patch_size = 3;
  CHECK(apply_spatial_mask(img, patch0, s) == img);
  CHECK(apply_spatial_mask(img, spec_of(MaskKind::pixel, 1.0), s) == ImageBuffer(9, 6, 1));

  auto big = spec_of(MaskKind::patch, 0.5);
  big.patch_size = 7;
  CHECK_THROWS_AS(apply_spatial_mask(img, big, s), std::invalid_argument);
  CHECK_THROWS_AS(apply_spatial_mask(img, spec_of(MaskKind::frequency, 0.5), s), std::invalid_argument);
}

TEST_CASE("4x4 ones, 2x2 patches at r=0.5 zero two aligned blocks") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ImageBuffer ones(4, 4, 1, 1.0);
    auto spec = spec_of(MaskKind::patch, 0.5);
    spec.patch_size = 2;
    RandomStream s(seed);
    const auto out = apply_spatial_mask(ones, spec, s);
    int zeros = 0;
    for (double v : out.data()) zeros += v == 0.0;
    CHECK(zeros == 8);
    for (std::size_t by = 0; by < 2; ++by)
      for (std::size_t bx = 0; bx < 2; ++bx) {
        const double first = out.at(2 * by, 2 * bx, 0);
        for (std::size_t dy = 0; dy < 2; ++dy)
          for (std::size_t dx = 0; dx < 2; ++dx) CHECK(out.at(2 * by + dy, 2 * bx + dx, 0) == first);
      }
  }
}

TEST_CASE("partial edge patches are never selected") {
  const ImageBuffer ones(7, 5, 1, 1.0);
  auto spec = spec_of(MaskKind::patch, 1.0);
  spec.patch_size = 2;
  RandomStream s(3);
  const auto out = apply_spatial_mask(ones, spec, s);
  for (std::size_t y = 0; y < 5; ++y)
    for (std::size_t x = 0; x < 7; ++x) CHECK(out.at(y, x, 0) == ((y < 4 && x < 6) ? 0.0 : 1.0));
}

TEST_CASE("frequency bins: counts, region and shared draw") {
  for (Band band : {Band::low, Band::mid, Band::high, Band::all}) {
    auto spec = spec_of(MaskKind::frequency, 0.3);
    spec.band = band;
    RandomStream s(2);
    const auto bins = select_frequency_bins(12, 10, spec, s);
    const auto reg = band_region(band, 12, 10);
    CHECK(bins.size() == frequency_mask_count(reg, 0.3));
    CHECK(std::set<Coord>(bins.begin(), bins.end()).size() == bins.size());
    for (const auto& [u, v] : bins) {
      CHECK(u >= reg.u_start);
      CHECK(u < reg.u_end);
      CHECK(v >= reg.v_start);
      CHECK(v < reg.v_end);
    }
  }
}

TEST_CASE("shifted reading maps DC-centred bounds onto unshifted storage") {
  auto plain = spec_of(MaskKind::frequency, 1.0);
  plain.band = Band::mid;
  auto shifted = plain;
  shifted.shifted = true;
  RandomStream a(4), b(4);
  const auto p = select_frequency_bins(8, 8, plain, a);
  const auto q = select_frequency_bins(8, 8, shifted, b);
  REQUIRE(p.size() == q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(q[i].first == (p[i].first + 4) % 8);
    CHECK(q[i].second == (p[i].second + 4) % 8);
  }
  // the centred mid block holds the lowest frequencies, DC included
  CHECK(std::count(q.begin(), q.end(), Coord{0, 0}) == 1);
}

TEST_CASE("frequency masking: symmetric mode removes exactly the selected energy") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto img = random_image(16 + seed, 12, 1 + 2 * (seed % 2), seed);
    const std::size_t h = img.height(), w = img.width();
    auto spec = spec_of(MaskKind::frequency, 0.15);
    spec.symmetric = true;
    RandomStream s(seed + 100);
    const auto res = frequency_mask_unclamped(img, spec, s);

    const auto before = fft2(img);
    const auto after = fft2(res.output);
    std::set<Coord> zeroed;
    for (const auto& [u, v] : res.bins) {
      zeroed.insert({u, v});
      zeroed.insert(hermitian_partner(u, v, h, w));
    }
    for (std::size_t c = 0; c < img.channels(); ++c) {
      double removed = 0.0, total = 0.0, remaining = 0.0;
      for (std::size_t u = 0; u < h; ++u)
        for (std::size_t v = 0; v < w; ++v) {
          const double pw = std::norm(before.at(u, v, c));
          total += pw;
          remaining += std::norm(after.at(u, v, c));
          if (zeroed.count({u, v})) removed += pw;
        }
      CHECK(std::abs(remaining - (total - removed)) <= 1e-6 * total);
      for (const auto& [u, v] : res.bins) CHECK(std::abs(after.at(u, v, c)) < 1e-6 * static_cast<double>(h * w));
    }
    // energy never grows (before clamping)
    CHECK(energy(res.output.data) <= energy(img.data()) + 1e-6);
  }
}

TEST_CASE("frequency masking: asymmetric mode leaves half the conjugate behind") {
  const auto img = random_image(16, 16, 1, 21);
  auto spec = spec_of(MaskKind::frequency, 0.15);
  RandomStream s(5);
  const auto res = frequency_mask_unclamped(img, spec, s);
  const auto before = fft2(img);
  const auto after = fft2(res.output);
  const std::set<Coord> chosen(res.bins.begin(), res.bins.end());
  bool some_bin_restored = false;
  for (const auto& [u, v] : res.bins) {
    const auto partner = hermitian_partner(u, v, 16, 16);
    if (partner == Coord{u, v} || chosen.count(partner)) {
      CHECK(std::abs(after.at(u, v, 0)) < 1e-9 * 256);
      continue;
    }
    // real-part extraction averages the zeroed bin with its surviving partner
    CHECK(std::abs(after.at(u, v, 0) - 0.5 * std::conj(before.at(partner.first, partner.second, 0))) < 1e-9 * 256);
    if (std::abs(after.at(u, v, 0)) >= 1e-6 * 256) some_bin_restored = true;
  }
  CHECK(some_bin_restored);
}

TEST_CASE("frequency masking extremes") {
  const auto img = random_image(11, 9, 3, 8);
  for (Band band : {Band::low, Band::mid, Band::high, Band::all}) {
    auto spec = spec_of(MaskKind::frequency, 0.0);
    spec.band = band;
    RandomStream s(1);
    const auto out = apply_frequency_mask(img, spec, s);
    for (std::size_t i = 0; i < out.data().size(); ++i) CHECK(std::abs(out.data()[i] - img.data()[i]) < 1e-6);
  }

  RandomStream s(2);
  CHECK(apply_frequency_mask(img, spec_of(MaskKind::frequency, 1.0), s) == ImageBuffer(11, 9, 3));

  const ImageBuffer flat(8, 8, 1, 0.6);
  auto low = spec_of(MaskKind::frequency, 1.0);
  low.band = Band::low;
  const auto out = apply_frequency_mask(flat, low, s);
  for (double v : out.data()) CHECK(std::abs(v) < 1e-6);

  CHECK_THROWS_AS(apply_frequency_mask(img, spec_of(MaskKind::pixel, 0.5), s), std::invalid_argument);
}

TEST_CASE("apply_mask dispatches, is deterministic and counts calls") {
  const auto img = random_image(16, 16, 3, 12);
  const auto before = mask_invocation_count();
  RandomStream a(7), b(7);
  const auto spec = spec_of(MaskKind::frequency, 0.15);
  CHECK(apply_mask(img, spec, a) == apply_mask(img, spec, b));
  CHECK(mask_invocation_count() == before + 2);

  RandomStream c(3);
  CHECK(apply_mask(img, spec_of(MaskKind::pixel, 0.0), c) == img);
  RandomStream d(3), e(3);
  CHECK(apply_mask(img, spec_of(MaskKind::pixel, 0.4), d) == apply_spatial_mask(img, spec_of(MaskKind::pixel, 0.4), e));
  CHECK(mask_invocation_count() == before + 4);
}
