#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "freqmask/detector.hpp"

namespace freqmask {

/// Ranking used by average_precision: a seeded permutation of the indices
/// followed by a stable sort on descending score. Tied scores therefore land in
/// a reproducible pseudo-random order.
std::vector<std::size_t> ranking_order(std::span<const double> scores, std::uint64_t tie_seed = 0);

/// Non-interpolated AP, sum_k P(k) rel(k) / n_pos, with label 1 as positive.
/// Throws std::invalid_argument on length mismatch or when no label is positive.
double average_precision(std::span<const double> scores, std::span<const int> labels, std::uint64_t tie_seed = 0);

struct FamilyResult {
  std::string family;
  double ap = 0.0;
  std::size_t n_real = 0;
  std::size_t n_fake = 0;
};

struct EvalReport {
  std::vector<FamilyResult> per_family;  // ascending by family name
  double map = 0.0;

  std::string to_csv() const;
};

/// Sorts by family name and sets map to the mean AP.
EvalReport make_report(std::vector<FamilyResult> per_family);

/// Named test set: real (label 0) and fake (label 1) images of one generator family.
struct TestFamily {
  std::string name;
  std::vector<LabeledImage> images;
};

struct ScoredFamily {
  std::string name;
  std::vector<double> scores;
  std::vector<int> labels;
};

EvalReport report_from_scores(std::span<const ScoredFamily> families, std::uint64_t tie_seed = 0);

/// Scores every image with the unmasked inference path and reports AP per
/// family (fake = positive) and their mean. Ranking uses the detector logit,
/// a strictly increasing function of predict(), so it does not saturate.
EvalReport evaluate(const LinearDetector& detector, std::span<const TestFamily> families, std::uint64_t tie_seed = 0);

}  // namespace freqmask
