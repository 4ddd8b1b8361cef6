#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "freqmask/detector.hpp"
#include "freqmask/evaluation.hpp"
#include "freqmask/image.hpp"
#include "freqmask/rng.hpp"

namespace freqmask {

enum class Family { real, fake_grid, fake_highcut, fake_midnotch };

inline constexpr Family kFakeFamilies[] = {Family::fake_grid, Family::fake_highcut, Family::fake_midnotch};

std::string_view to_string(Family family) noexcept;
Family parse_family(std::string_view text);

struct FamilyConfig {
  Family family = Family::real;
  std::size_t size = 64;
  double artifact_strength = 0.0;
  double spectral_slope = 2.0;
  double notch_radius = 0.45;  // fraction of the image size

  void validate() const;
};

/// Amplitude of the 1/f shaping at wraparound radius f: (1 + f)^(-slope/2).
double spectral_amplitude(double radius, double slope) noexcept;

/// Gaussian white noise shaped to a 1/f^slope power law, rescaled to [0,1].
ImageBuffer generate_real(const FamilyConfig& config, RandomStream& stream);

/// The real pipeline with a family artifact planted before the rescale:
///  - fake_grid: spikes at harmonics k*(H/8, 0) and k*(0, W/8), k = 1..7, with
///    amplitude strength times the expected shaped-noise amplitude at that bin
///  - fake_highcut: the unshifted high band and its mirror scaled by 1/(1+strength)
///  - fake_midnotch: bins of the mid band whose radius lies within strength/2 of
///    notch_radius * size are zeroed, mirrors included
ImageBuffer generate_fake(const FamilyConfig& config, RandomStream& stream);

ImageBuffer generate_image(const FamilyConfig& config, RandomStream& stream);

/// Bins the midnotch artifact zeroes for a given config.
std::vector<std::pair<std::size_t, std::size_t>> midnotch_bins(const FamilyConfig& config);

/// Calibrated default artifact strengths.
struct ArtifactStrengths {
  double grid = 5.0;
  double highcut = 3.0;
  double midnotch = 6.0;

  double of(Family family) const noexcept;
};

struct CorpusConfig {
  std::size_t size = 64;
  std::size_t n_per_class = 100;
  double spectral_slope = 2.0;
  ArtifactStrengths strengths{};
  Family train_family = Family::fake_grid;

  void validate() const;
  FamilyConfig family_config(Family family) const;
};

enum class Split { train, test };
std::string_view to_string(Split split) noexcept;

struct CorpusImage {
  Split split = Split::train;
  Family family = Family::real;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  ImageBuffer image;
};

/// Train: n real + n of the designated fake family. Test: n real + n per fake family.
/// Every image is generated from its own seed derived from (master, split, family, index).
struct Corpus {
  std::uint64_t master_seed = 0;
  CorpusConfig config;
  std::vector<CorpusImage> train;
  std::vector<CorpusImage> test;

  std::vector<LabeledImage> training_set() const;
  /// One test set per fake family, each paired with the shared real test images.
  std::vector<TestFamily> test_families() const;
};

std::uint64_t corpus_image_seed(std::uint64_t master_seed, Split split, Family family, std::size_t index) noexcept;

Corpus build_corpus(std::uint64_t master_seed, const CorpusConfig& config = {});

/// Writes <split>/<family>/<index>.png and manifest.json under dir.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

/// Reads a directory produced by write_corpus.
Corpus read_corpus(const std::filesystem::path& dir);

}  // namespace freqmask
