#include "freqmask/detector.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace freqmask {

namespace {

constexpr std::uint64_t kAugmentTag = 0xA0;
constexpr std::uint64_t kMaskTag = 0xA1;
constexpr std::uint64_t kShuffleTag = 0xA2;

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

Standardizer Standardizer::fit(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw std::invalid_argument("cannot fit standardization on no rows");
  const std::size_t d = rows.front().size();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.std.assign(d, 0.0);
  for (const auto& r : rows) {
    if (r.size() != d) throw std::invalid_argument("inconsistent feature length");
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
  }
  const auto n = static_cast<double>(rows.size());
  for (auto& m : s.mean) m /= n;
  for (const auto& r : rows)
    for (std::size_t j = 0; j < d; ++j) s.std[j] += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
  for (auto& v : s.std) v = std::max(std::sqrt(v / n), kMinFeatureStd);
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) throw std::invalid_argument("feature length does not match standardization");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / std[j];
  return out;
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_l2_loss(std::span<const double> w, double b, std::span<const double> x, double y, double l2) {
  const double z = dot(w, x) + b;
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return softplus - y * z + l2 * dot(w, w);
}

void bce_l2_gradient(std::span<const double> w, double b, std::span<const double> x, double y, double l2,
                     std::span<double> grad_w, double& grad_b) {
  const double residual = sigmoid(dot(w, x) + b) - y;
  for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] = residual * x[j] + 2.0 * l2 * w[j];
  grad_b = residual;
}

LinearDetector LinearDetector::zeros(std::size_t bins) {
  LinearDetector d;
  d.feature_bins = bins;
  d.weights.assign(bins + 1, 0.0);
  d.feature_mean.assign(bins + 1, 0.0);
  d.feature_std.assign(bins + 1, 1.0);
  return d;
}

double LinearDetector::decision(std::span<const double> features) const {
  if (!fitted()) throw UnfittedDetectorError("detector has not been fitted");
  if (features.size() != weights.size() || feature_mean.size() != weights.size() || feature_std.size() != weights.size())
    throw std::invalid_argument("feature length does not match detector");
  double z = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * (features[j] - feature_mean[j]) / feature_std[j];
  return z;
}

std::string LinearDetector::to_json() const {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["feature_bins"] = feature_bins;
  j["weights"] = weights;
  j["bias"] = bias;
  j["feature_mean"] = feature_mean;
  j["feature_std"] = feature_std;
  return j.dump(2);
}

LinearDetector LinearDetector::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("detector JSON: ") + e.what());
  }
  if (j.value("format_version", 0) != kFormatVersion) throw std::runtime_error("unsupported detector format_version");
  LinearDetector d;
  try {
    d.feature_bins = j.at("feature_bins").get<std::size_t>();
    d.weights = j.at("weights").get<std::vector<double>>();
    d.bias = j.at("bias").get<double>();
    d.feature_mean = j.at("feature_mean").get<std::vector<double>>();
    d.feature_std = j.at("feature_std").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("detector JSON: ") + e.what());
  }
  const std::size_t d_len = d.feature_bins + 1;
  if (d.weights.size() != d_len || d.feature_mean.size() != d_len || d.feature_std.size() != d_len)
    throw std::runtime_error("detector JSON: vector lengths do not match feature_bins");
  for (double s : d.feature_std)
    if (!(s > 0.0)) throw std::runtime_error("detector JSON: feature_std must be positive");
  return d;
}

void LinearDetector::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write detector: " + path.string());
  out << to_json() << '\n';
}

LinearDetector LinearDetector::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read detector: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw std::invalid_argument("learning rate must be > 0");
  if (!(l2_penalty >= 0.0) || !std::isfinite(l2_penalty)) throw std::invalid_argument("l2 penalty must be >= 0");
  if (feature_bins == 0) throw std::invalid_argument("feature bins must be >= 1");
  augment.validate();
  if (mask) mask->validate();
}

LogisticFit fit_logistic(const std::vector<std::vector<std::vector<double>>>& features, std::span<const int> labels,
                         const LogisticOptions& options) {
  if (features.empty() || features.front().empty()) throw std::invalid_argument("fit_logistic: no training data");
  const std::size_t n = labels.size();
  const std::size_t d = features.front().front().size();
  for (const auto& epoch : features)
    if (epoch.size() != n) throw std::invalid_argument("fit_logistic: feature/label count mismatch");

  LogisticFit fit;
  fit.weights.assign(d, 0.0);
  std::vector<double> grad(d);
  std::vector<double> acc(d);
  const RandomStream order_root(options.seed);

  for (std::size_t e = 0; e < options.epochs; ++e) {
    const auto& view = features[features.size() == 1 ? 0 : e % features.size()];
    double total = 0.0;
    if (options.full_batch) {
      std::fill(acc.begin(), acc.end(), 0.0);
      double acc_b = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double y = labels[i];
        total += bce_l2_loss(fit.weights, fit.bias, view[i], y, options.l2_penalty);
        double gb = 0.0;
        bce_l2_gradient(fit.weights, fit.bias, view[i], y, options.l2_penalty, grad, gb);
        for (std::size_t j = 0; j < d; ++j) acc[j] += grad[j];
        acc_b += gb;
      }
      const double scale = options.learning_rate / static_cast<double>(n);
      for (std::size_t j = 0; j < d; ++j) fit.weights[j] -= scale * acc[j];
      fit.bias -= scale * acc_b;
    } else {
      RandomStream order_stream = order_root.derive_substream(e);
      for (const auto i : random_permutation(order_stream, n)) {
        const double y = labels[i];
        total += bce_l2_loss(fit.weights, fit.bias, view[i], y, options.l2_penalty);
        double gb = 0.0;
        bce_l2_gradient(fit.weights, fit.bias, view[i], y, options.l2_penalty, grad, gb);
        for (std::size_t j = 0; j < d; ++j) fit.weights[j] -= options.learning_rate * grad[j];
        fit.bias -= options.learning_rate * gb;
      }
    }
    const double mean_loss = total / static_cast<double>(n);
    if (!std::isfinite(mean_loss) || !std::isfinite(fit.bias))
      throw TrainingDivergedError("training loss became non-finite; reduce the learning rate");
    fit.epoch_loss.push_back(mean_loss);
  }
  return fit;
}

LinearDetector train(std::span<const LabeledImage> train_set, const TrainConfig& config, TrainHistory* history) {
  config.validate();
  std::size_t positives = 0;
  for (const auto& ex : train_set) {
    if (ex.label != 0 && ex.label != 1) throw std::invalid_argument("labels must be 0 (real) or 1 (fake)");
    positives += static_cast<std::size_t>(ex.label);
  }
  if (positives == 0 || positives == train_set.size())
    throw std::invalid_argument("training set must contain both real and fake examples");

  const std::size_t n = train_set.size();
  const bool stochastic = config.mask.has_value() || config.augment.blur_prob > 0.0 || config.augment.jpeg_prob > 0.0;
  const std::size_t views = stochastic ? config.epochs : 1;
  const RandomStream root(config.seed);
  const std::uint64_t calls_before = mask_invocation_count();

  std::vector<std::vector<std::vector<double>>> features(views, std::vector<std::vector<double>>(n));
  std::vector<std::vector<double>> pooled;
  pooled.reserve(views * n);
  for (std::size_t e = 0; e < views; ++e) {
    for (std::size_t i = 0; i < n; ++i) {
      RandomStream aug_stream = root.derive_substream({kAugmentTag, e, i});
      ImageBuffer img = augment(train_set[i].image, aug_stream, config.augment);
      if (config.mask) {
        RandomStream mask_stream = root.derive_substream({kMaskTag, e, i});
        img = apply_mask(img, *config.mask, mask_stream);
      }
      features[e][i] = extract_features(img, config.feature_bins);
      pooled.push_back(features[e][i]);
    }
  }

  const Standardizer standardizer = Standardizer::fit(pooled);
  for (auto& epoch : features)
    for (auto& row : epoch) row = standardizer.apply(row);

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = train_set[i].label;

  LogisticOptions options;
  options.epochs = config.epochs;
  options.learning_rate = config.learning_rate;
  options.l2_penalty = config.l2_penalty;
  options.seed = root.derive_substream(kShuffleTag).seed();
  options.full_batch = config.full_batch;
  LogisticFit fit = fit_logistic(features, labels, options);

  if (history) {
    history->epoch_loss = fit.epoch_loss;
    history->mask_calls = mask_invocation_count() - calls_before;
  }

  LinearDetector detector;
  detector.weights = std::move(fit.weights);
  detector.bias = fit.bias;
  detector.feature_mean = standardizer.mean;
  detector.feature_std = standardizer.std;
  detector.feature_bins = config.feature_bins;
  return detector;
}

double predict_logit(const LinearDetector& detector, const ImageBuffer& image) {
  if (!detector.fitted()) throw UnfittedDetectorError("detector has not been fitted");
  return detector.decision(extract_features(image, detector.feature_bins));
}

double predict(const LinearDetector& detector, const ImageBuffer& image) {
  return sigmoid(predict_logit(detector, image));
}

}  // namespace freqmask
