#include "freqmask/image.hpp"

#include <cmath>

namespace freqmask {

void AugmentSettings::validate() const {
  auto prob_ok = [](double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; };
  if (!prob_ok(blur_prob) || !prob_ok(jpeg_prob)) throw std::invalid_argument("augment probabilities must lie in [0,1]");
  if (!(sigma_range.first >= 0.0) || !(sigma_range.second >= sigma_range.first) || !std::isfinite(sigma_range.second))
    throw std::invalid_argument("invalid blur sigma range");
  if (quality_range.first < 1 || quality_range.second > 100 || quality_range.first > quality_range.second)
    throw std::invalid_argument("invalid JPEG quality range");
}

AugmentPlan plan_augment(RandomStream& rng, const AugmentSettings& settings) {
  settings.validate();
  AugmentPlan plan;
  if (rng.uniform_real() < settings.blur_prob) {
    const auto [lo, hi] = settings.sigma_range;
    const double sigma = lo + (hi - lo) * rng.uniform_real();
    if (sigma > 0.0) plan.blur_sigma = sigma;
  }
  if (rng.uniform_real() < settings.jpeg_prob) {
    const auto [lo, hi] = settings.quality_range;
    plan.jpeg_quality = static_cast<int>(rng.uniform_int(lo, hi));
  }
  return plan;
}

ImageBuffer apply_augment(const ImageBuffer& image, const AugmentPlan& plan) {
  ImageBuffer out = plan.blur_sigma ? gaussian_blur(image, *plan.blur_sigma) : image;
  if (plan.jpeg_quality) out = jpeg_compress(out, *plan.jpeg_quality);
  return out;
}

ImageBuffer augment(const ImageBuffer& image, RandomStream& rng, const AugmentSettings& settings) {
  return apply_augment(image, plan_augment(rng, settings));
}

}  // namespace freqmask
