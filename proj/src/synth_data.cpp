#include "freqmask/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "freqmask/masking.hpp"
#include "freqmask/spectrum.hpp"

namespace freqmask {

namespace {

double wrapped_radius(std::size_t u, std::size_t v, std::size_t h, std::size_t w) {
  return std::hypot(wrapped_frequency(u, h), wrapped_frequency(v, w));
}

Spectrum shaped_noise(const FamilyConfig& config, RandomStream& stream) {
  const std::size_t n = config.size;
  Raster noise(n, n, 1);
  for (auto& v : noise.data) v = stream.normal();
  Spectrum s = fft2(noise);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) s.at(u, v, 0) *= spectral_amplitude(wrapped_radius(u, v, n, n), config.spectral_slope);
  return s;
}

ImageBuffer rescale_to_unit(const Spectrum& s) {
  Raster r = ifft2_real(s);
  const auto [lo, hi] = std::minmax_element(r.data.begin(), r.data.end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (auto& v : r.data) v = range > 0.0 ? (v - min) / range : 0.5;
  return ImageBuffer::from_raster(r);
}

void plant_grid(Spectrum& s, const FamilyConfig& config, RandomStream& stream) {
  const std::size_t n = config.size;
  const std::size_t step = n / 8;
  const double base = std::sqrt(static_cast<double>(n * n));
  std::vector<Coord> spikes;
  for (std::size_t k = 1; k <= 7; ++k) {
    spikes.emplace_back(k * step, 0);
    spikes.emplace_back(0, k * step);
  }
  for (const auto& [u, v] : spikes) {
    const auto [pu, pv] = hermitian_partner(u, v, n, n);
    if (std::make_pair(pu, pv) < std::make_pair(u, v)) continue;  // handled with its partner
    const double amplitude =
        config.artifact_strength * base * spectral_amplitude(wrapped_radius(u, v, n, n), config.spectral_slope);
    if (pu == u && pv == v) {
      s.at(u, v, 0) += stream.uniform_real() < 0.5 ? -amplitude : amplitude;
    } else {
      const Complex spike = std::polar(amplitude, 2.0 * std::numbers::pi * stream.uniform_real());
      s.at(u, v, 0) += spike;
      s.at(pu, pv, 0) += std::conj(spike);
    }
  }
}

void plant_highcut(Spectrum& s, const FamilyConfig& config) {
  const std::size_t n = config.size;
  const BandRegion high = band_region(Band::high, n, n);
  std::vector<char> hit(n * n, 0);
  for (std::size_t u = high.u_start; u < high.u_end; ++u) {
    for (std::size_t v = high.v_start; v < high.v_end; ++v) {
      const auto [pu, pv] = hermitian_partner(u, v, n, n);
      hit[u * n + v] = 1;
      hit[pu * n + pv] = 1;
    }
  }
  const double gain = 1.0 / (1.0 + config.artifact_strength);
  for (std::size_t i = 0; i < n * n; ++i)
    if (hit[i]) s.coeffs[i] *= gain;
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::real: return "real";
    case Family::fake_grid: return "fake_grid";
    case Family::fake_highcut: return "fake_highcut";
    case Family::fake_midnotch: return "fake_midnotch";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  for (Family f : {Family::real, Family::fake_grid, Family::fake_highcut, Family::fake_midnotch})
    if (text == to_string(f)) return f;
  throw std::invalid_argument("unknown family: " + std::string(text));
}

std::string_view to_string(Split split) noexcept { return split == Split::train ? "train" : "test"; }

void FamilyConfig::validate() const {
  if (size < 16) throw std::invalid_argument("synthetic image size must be >= 16");
  if (!(artifact_strength >= 0.0) || !std::isfinite(artifact_strength))
    throw std::invalid_argument("artifact strength must be >= 0");
  if (!std::isfinite(spectral_slope)) throw std::invalid_argument("spectral slope must be finite");
}

double spectral_amplitude(double radius, double slope) noexcept { return std::pow(1.0 + radius, -0.5 * slope); }

ImageBuffer generate_real(const FamilyConfig& config, RandomStream& stream) {
  config.validate();
  if (config.family != Family::real) throw std::invalid_argument("generate_real called with a fake family");
  return rescale_to_unit(shaped_noise(config, stream));
}

std::vector<std::pair<std::size_t, std::size_t>> midnotch_bins(const FamilyConfig& config) {
  const std::size_t n = config.size;
  const BandRegion mid = band_region(Band::mid, n, n);
  const double centre = config.notch_radius * static_cast<double>(n);
  const double half_width = 0.5 * config.artifact_strength;
  std::vector<char> hit(n * n, 0);
  for (std::size_t u = mid.u_start; u < mid.u_end; ++u) {
    for (std::size_t v = mid.v_start; v < mid.v_end; ++v) {
      if (std::abs(wrapped_radius(u, v, n, n) - centre) >= half_width) continue;
      const auto [pu, pv] = hermitian_partner(u, v, n, n);
      hit[u * n + v] = 1;
      hit[pu * n + pv] = 1;
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> bins;
  for (std::size_t i = 0; i < n * n; ++i)
    if (hit[i]) bins.emplace_back(i / n, i % n);
  return bins;
}

ImageBuffer generate_fake(const FamilyConfig& config, RandomStream& stream) {
  config.validate();
  Spectrum s = shaped_noise(config, stream);
  switch (config.family) {
    case Family::fake_grid: plant_grid(s, config, stream); break;
    case Family::fake_highcut: plant_highcut(s, config); break;
    case Family::fake_midnotch:
      for (const auto& [u, v] : midnotch_bins(config)) s.at(u, v, 0) = Complex{};
      break;
    case Family::real: throw std::invalid_argument("generate_fake called with the real family");
  }
  return rescale_to_unit(s);
}

ImageBuffer generate_image(const FamilyConfig& config, RandomStream& stream) {
  return config.family == Family::real ? generate_real(config, stream) : generate_fake(config, stream);
}

double ArtifactStrengths::of(Family family) const noexcept {
  switch (family) {
    case Family::fake_grid: return grid;
    case Family::fake_highcut: return highcut;
    case Family::fake_midnotch: return midnotch;
    case Family::real: break;
  }
  return 0.0;
}

void CorpusConfig::validate() const {
  if (n_per_class < 10) throw std::invalid_argument("corpus needs at least 10 images per class");
  if (train_family == Family::real) throw std::invalid_argument("training family must be a fake family");
  family_config(Family::real).validate();
  for (Family f : kFakeFamilies) family_config(f).validate();
}

FamilyConfig CorpusConfig::family_config(Family family) const {
  FamilyConfig fc;
  fc.family = family;
  fc.size = size;
  fc.spectral_slope = spectral_slope;
  fc.artifact_strength = strengths.of(family);
  return fc;
}

std::uint64_t corpus_image_seed(std::uint64_t master_seed, Split split, Family family, std::size_t index) noexcept {
  return RandomStream(master_seed)
      .derive_substream({static_cast<std::uint64_t>(split), static_cast<std::uint64_t>(family), index})
      .seed();
}

Corpus build_corpus(std::uint64_t master_seed, const CorpusConfig& config) {
  config.validate();
  Corpus corpus;
  corpus.master_seed = master_seed;
  corpus.config = config;

  auto emit = [&](Split split, Family family, std::vector<CorpusImage>& out) {
    const FamilyConfig fc = config.family_config(family);
    for (std::size_t i = 0; i < config.n_per_class; ++i) {
      CorpusImage img;
      img.split = split;
      img.family = family;
      img.index = i;
      img.seed = corpus_image_seed(master_seed, split, family, i);
      RandomStream stream(img.seed);
      img.image = generate_image(fc, stream);
      out.push_back(std::move(img));
    }
  };

  emit(Split::train, Family::real, corpus.train);
  emit(Split::train, config.train_family, corpus.train);
  emit(Split::test, Family::real, corpus.test);
  for (Family f : kFakeFamilies) emit(Split::test, f, corpus.test);
  return corpus;
}

std::vector<LabeledImage> Corpus::training_set() const {
  std::vector<LabeledImage> set;
  set.reserve(train.size());
  for (const auto& img : train) set.push_back({img.image, img.family == Family::real ? 0 : 1});
  return set;
}

std::vector<TestFamily> Corpus::test_families() const {
  std::vector<TestFamily> families;
  for (Family f : kFakeFamilies) {
    TestFamily tf;
    tf.name = std::string(to_string(f));
    for (const auto& img : test)
      if (img.family == Family::real) tf.images.push_back({img.image, 0});
    for (const auto& img : test)
      if (img.family == f) tf.images.push_back({img.image, 1});
    if (tf.images.size() > 0 && std::any_of(test.begin(), test.end(), [f](const CorpusImage& c) { return c.family == f; }))
      families.push_back(std::move(tf));
  }
  return families;
}

}  // namespace freqmask
