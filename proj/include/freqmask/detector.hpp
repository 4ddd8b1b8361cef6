#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqmask/image.hpp"
#include "freqmask/masking.hpp"

namespace freqmask {

inline constexpr std::size_t kDefaultFeatureBins = 32;
inline constexpr double kBandRatioEpsilon = 1e-12;
inline constexpr double kMinFeatureStd = 1e-8;

/// B azimuthally averaged log-power bins followed by log(E_high / E_low).
///
/// The image is reduced to its channel mean. Annulus k (1..B) collects the
/// non-DC bins whose wraparound radius lies in ((k-1) r_max / B, k r_max / B],
/// r_max = hypot(H/2, W/2); each entry is log1p of the annulus mean power.
/// The band energies use the unshifted high and low regions with DC left out,
/// so adding a constant offset changes no feature.
std::vector<double> extract_features(const ImageBuffer& image, std::size_t bins = kDefaultFeatureBins);
std::vector<double> extract_features(const Raster& gray, std::size_t bins = kDefaultFeatureBins);

/// Annulus (1..B) a bin falls into; 0 for DC.
std::size_t annulus_of(std::size_t u, std::size_t v, std::size_t height, std::size_t width, std::size_t bins);

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;

  static Standardizer fit(std::span<const std::vector<double>> rows);
  std::vector<double> apply(std::span<const double> x) const;
};

double sigmoid(double z) noexcept;

/// BCE(sigmoid(w.x + b), y) + l2 * |w|^2, evaluated in log-sum-exp form.
double bce_l2_loss(std::span<const double> w, double b, std::span<const double> x, double y, double l2);

/// Analytic gradient of bce_l2_loss.
void bce_l2_gradient(std::span<const double> w, double b, std::span<const double> x, double y, double l2,
                     std::span<double> grad_w, double& grad_b);

class UnfittedDetectorError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class TrainingDivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Logistic model over standardized spectral features. Immutable once fitted.
struct LinearDetector {
  static constexpr int kFormatVersion = 1;

  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> feature_mean;
  std::vector<double> feature_std;
  std::size_t feature_bins = kDefaultFeatureBins;

  /// Zero weights and bias over identity standardization.
  static LinearDetector zeros(std::size_t bins = kDefaultFeatureBins);

  bool fitted() const noexcept { return !weights.empty(); }

  /// w . standardize(features) + b
  double decision(std::span<const double> features) const;

  std::string to_json() const;
  static LinearDetector from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static LinearDetector load(const std::filesystem::path& path);

  friend bool operator==(const LinearDetector&, const LinearDetector&) = default;
};

struct LabeledImage {
  ImageBuffer image;
  int label = 0;  // 1 = fake
};

struct TrainConfig {
  std::optional<MaskSpec> mask;  // training-time only
  std::size_t epochs = 10;
  double learning_rate = 0.05;
  double l2_penalty = 1e-3;
  std::uint64_t seed = 0;
  AugmentSettings augment{};
  std::size_t feature_bins = kDefaultFeatureBins;
  bool full_batch = false;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> epoch_loss;  // mean BCE+L2 per epoch
  std::uint64_t mask_calls = 0;
};

struct LogisticOptions {
  std::size_t epochs = 10;
  double learning_rate = 0.05;
  double l2_penalty = 1e-3;
  std::uint64_t seed = 0;
  bool full_batch = false;
};

/// SGD (or full-batch gradient descent) on already standardized features.
/// features[e][i] is example i as seen in epoch e; a single epoch entry is
/// reused for every epoch. Order within an epoch is a seeded permutation.
struct LogisticFit {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> epoch_loss;
};
LogisticFit fit_logistic(const std::vector<std::vector<std::vector<double>>>& features, std::span<const int> labels,
                         const LogisticOptions& options);

/// Per epoch and image: augment, mask (if configured), extract features;
/// standardize over all training features; fit by SGD on BCE + L2.
LinearDetector train(std::span<const LabeledImage> train_set, const TrainConfig& config,
                     TrainHistory* history = nullptr);

/// sigmoid(decision(extract_features(image))). Never masks or augments.
double predict(const LinearDetector& detector, const ImageBuffer& image);
double predict_logit(const LinearDetector& detector, const ImageBuffer& image);

}  // namespace freqmask
