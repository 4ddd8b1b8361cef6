#include "freqmask/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "freqmask/rng.hpp"

namespace freqmask {

std::vector<std::size_t> ranking_order(std::span<const double> scores, std::uint64_t tie_seed) {
  RandomStream stream(tie_seed);
  auto order = random_permutation(stream, scores.size());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

double average_precision(std::span<const double> scores, std::span<const int> labels, std::uint64_t tie_seed) {
  if (scores.size() != labels.size()) throw std::invalid_argument("average_precision: length mismatch");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) throw std::invalid_argument("average_precision: no positive labels");

  double sum = 0.0;
  std::size_t hits = 0;
  std::size_t rank = 0;
  for (const auto i : ranking_order(scores, tie_seed)) {
    ++rank;
    if (labels[i] == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank);
    }
  }
  return sum / static_cast<double>(positives);
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "family,ap,n_real,n_fake\n";
  char buf[64];
  for (const auto& f : per_family) {
    std::snprintf(buf, sizeof buf, "%.17g", f.ap);
    out << f.family << ',' << buf << ',' << f.n_real << ',' << f.n_fake << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.17g", map);
  out << "mAP," << buf << ",,\n";
  return out.str();
}

EvalReport make_report(std::vector<FamilyResult> per_family) {
  if (per_family.empty()) throw std::invalid_argument("evaluation report needs at least one family");
  std::sort(per_family.begin(), per_family.end(),
            [](const FamilyResult& a, const FamilyResult& b) { return a.family < b.family; });
  EvalReport report;
  double sum = 0.0;
  for (const auto& f : per_family) sum += f.ap;
  report.map = sum / static_cast<double>(per_family.size());
  report.per_family = std::move(per_family);
  return report;
}

EvalReport report_from_scores(std::span<const ScoredFamily> families, std::uint64_t tie_seed) {
  std::vector<FamilyResult> results;
  for (const auto& fam : families) {
    FamilyResult r;
    r.family = fam.name;
    r.n_fake = static_cast<std::size_t>(std::count(fam.labels.begin(), fam.labels.end(), 1));
    r.n_real = fam.labels.size() - r.n_fake;
    if (r.n_real == 0 || r.n_fake == 0)
      throw std::invalid_argument("family '" + fam.name + "' needs both real and fake images");
    r.ap = average_precision(fam.scores, fam.labels, tie_seed);
    results.push_back(std::move(r));
  }
  return make_report(std::move(results));
}

EvalReport evaluate(const LinearDetector& detector, std::span<const TestFamily> families, std::uint64_t tie_seed) {
  if (!detector.fitted()) throw UnfittedDetectorError("detector has not been fitted");
  std::vector<ScoredFamily> scored;
  scored.reserve(families.size());
  for (const auto& fam : families) {
    ScoredFamily s;
    s.name = fam.name;
    for (const auto& ex : fam.images) {
      s.scores.push_back(predict_logit(detector, ex.image));
      s.labels.push_back(ex.label);
    }
    scored.push_back(std::move(s));
  }
  return report_from_scores(scored, tie_seed);
}

}  // namespace freqmask
