#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "freqmask/detector.hpp"
#include "freqmask/evaluation.hpp"
#include "freqmask/masking.hpp"
#include "freqmask/synth_data.hpp"

namespace freqmask {

struct LabeledSpec {
  std::string label;
  MaskSpec spec;
};

/// The unmasked baseline is frequency masking at r = 0, which apply_mask
/// returns unchanged; routing it through apply_mask keeps instrumentation
/// uniform across runs.
LabeledSpec baseline_spec(std::string label = "none");

struct SweepConfig {
  CorpusConfig corpus{};
  std::vector<LabeledSpec> specs;
  std::size_t n_seeds = 5;
  std::uint64_t master_seed = 0;
  TrainConfig train{};
  std::size_t threads = 0;  // 0: hardware concurrency
  std::vector<std::string> reference_notes;

  void validate() const;
};

struct RunResult {
  std::string label;
  MaskSpec spec;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  std::vector<FamilyResult> families;  // ascending by name
  double map = 0.0;
  std::uint64_t train_mask_calls = 0;
  std::uint64_t eval_mask_calls = 0;
};

struct AggregateRow {
  std::string label;
  MaskSpec spec;
  std::size_t n_seeds = 0;
  double map_mean = 0.0;
  double map_std = 0.0;  // sample std, 0 for a single seed
  std::vector<std::string> families;
  std::vector<double> family_ap_mean;
};

struct PairwiseDifference {
  std::string first;
  std::string second;
  double mean = 0.0;  // mean over seeds of mAP(second) - mAP(first)
  double std = 0.0;
};

struct SweepReport {
  std::string title;
  std::vector<std::string> reference_notes;
  std::vector<RunResult> runs;  // ordered by (spec, seed)
  std::vector<AggregateRow> aggregate;
  std::vector<PairwiseDifference> pairwise;
};

/// Seed for repetition i, a pure function of the master seed.
std::uint64_t repetition_seed(std::uint64_t master_seed, std::size_t seed_index) noexcept;

/// Builds one corpus per seed, trains and evaluates every spec on it. The
/// baseline is prepended when no spec has r = 0. Deterministic for a given
/// master seed regardless of thread count.
SweepReport run_sweep(const SweepConfig& config);

/// Mean and sample std per label, in order of first appearance.
std::vector<AggregateRow> aggregate_runs(const std::vector<RunResult>& runs);
std::vector<PairwiseDifference> pairwise_differences(const std::vector<RunResult>& runs);

/// Paper-style sweeps over a shared base configuration.
SweepConfig mask_types_sweep(SweepConfig base);
SweepConfig ratio_sweep(SweepConfig base);
SweepConfig band_sweep(SweepConfig base);

SweepReport compare_mask_types(const SweepConfig& base);
SweepReport sweep_ratios(const SweepConfig& base);
SweepReport compare_bands(const SweepConfig& base);

std::string raw_csv(const std::vector<RunResult>& runs);
std::vector<RunResult> parse_raw_csv(const std::string& text);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::string pairwise_csv(const std::vector<PairwiseDifference>& rows);
std::string summary_markdown(const SweepReport& report);

/// raw.csv, aggregate.csv, summary.md (and pairwise.csv when present).
void write_report(const SweepReport& report, const std::filesystem::path& dir);

}  // namespace freqmask
