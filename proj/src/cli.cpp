#include "freqmask/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "freqmask/detector.hpp"
#include "freqmask/evaluation.hpp"
#include "freqmask/experiment.hpp"
#include "freqmask/masking.hpp"
#include "freqmask/spectrum.hpp"
#include "freqmask/synth_data.hpp"

namespace freqmask {

namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MaskFlags {
  std::string kind;
  double ratio = 0.15;
  std::size_t patch_size = 8;
  std::string band = "all";
  bool symmetric = false;
  bool shifted = false;

  CLI::Option* kind_opt = nullptr;
  CLI::Option* patch_opt = nullptr;
  CLI::Option* band_opt = nullptr;
  CLI::Option* symmetric_opt = nullptr;
  CLI::Option* shifted_opt = nullptr;

  void add_to(CLI::App& app, bool kind_required) {
    kind_opt = app.add_option("--kind", kind, "Mask kind")->check(CLI::IsMember({"pixel", "patch", "frequency"}));
    if (kind_required) kind_opt->required();
    app.add_option("--ratio", ratio, "Masking ratio r in [0,1]")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    patch_opt = app.add_option("--patch-size", patch_size, "Patch side p (patch kind)")
                    ->check(CLI::PositiveNumber)
                    ->capture_default_str();
    band_opt = app.add_option("--band", band, "Frequency band (frequency kind)")
                   ->check(CLI::IsMember({"low", "mid", "high", "all"}))
                   ->capture_default_str();
    symmetric_opt = app.add_flag("--symmetric", symmetric, "Also zero Hermitian partners (frequency kind)");
    shifted_opt = app.add_flag("--shifted", shifted, "Read band bounds on a DC-centred spectrum (frequency kind)");
  }

  std::optional<MaskSpec> spec() const {
    if (kind.empty()) {
      if (patch_opt->count() || band_opt->count() || symmetric_opt->count() || shifted_opt->count())
        throw UsageError("mask flags given without --kind");
      return std::nullopt;
    }
    MaskSpec s;
    s.kind = parse_mask_kind(kind);
    s.ratio = ratio;
    if (s.kind != MaskKind::frequency && (band_opt->count() || symmetric_opt->count() || shifted_opt->count()))
      throw UsageError("--band/--symmetric/--shifted apply only to --kind frequency");
    if (s.kind != MaskKind::patch && patch_opt->count()) throw UsageError("--patch-size applies only to --kind patch");
    s.patch_size = patch_size;
    s.band = parse_band(band);
    s.symmetric = symmetric;
    s.shifted = shifted;
    return s;
  }
};

struct SeedFlag {
  std::uint64_t seed = 0;
  CLI::Option* opt = nullptr;

  void add_to(CLI::App& app) { opt = app.add_option("--seed", seed, "Master seed (falls back to $FREQMASK_SEED, then 0)"); }

  std::uint64_t resolve() const {
    if (opt->count()) return seed;
    if (const char* env = std::getenv("FREQMASK_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
        return v;
      } catch (const std::exception&) {
        throw UsageError("FREQMASK_SEED is not an unsigned integer");
      }
    }
    return 0;
  }
};

// Expands --config FILE into explicit flags for keys not already on the
// command line, so explicit flags win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;

  std::ifstream in(*path);
  if (!in) throw UsageError("cannot read config file " + *path);
  nlohmann::json cfg;
  try {
    in >> cfg;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");

  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    const bool present = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (present) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      args.push_back(flag);
      args.push_back(value.dump());
    } else if (value.is_number_float()) {
      args.push_back(flag);
      args.push_back(value.dump());
    } else {
      throw UsageError("config key '" + key + "' must be a scalar");
    }
  }
  return args;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_mask(const MaskFlags& flags, const SeedFlag& seed, const std::string& in, const std::string& out,
             std::ostream& log) {
  const MaskSpec spec = *flags.spec();
  const ImageBuffer image = load_image(in);
  RandomStream stream(seed.resolve());
  save_image(apply_mask(image, spec, stream), out, ImageFormat::png);
  log << "wrote " << out << '\n';
  return kExitOk;
}

int cmd_spectrum(const std::string& in, const std::string& out, bool shifted, std::ostream& log) {
  const ImageBuffer image = load_image(in);
  const Spectrum spec = fft2(image);
  const Raster power = power_spectrum(spec);

  const std::size_t h = image.height(), w = image.width(), ch = image.channels();
  std::vector<double> logmag(h * w, 0.0);
  double peak = 0.0;
  for (std::size_t u = 0; u < h; ++u) {
    for (std::size_t v = 0; v < w; ++v) {
      double mean_power = 0.0;
      for (std::size_t c = 0; c < ch; ++c) mean_power += power.at(u, v, c);
      const double value = std::log1p(std::sqrt(mean_power / static_cast<double>(ch)));
      const std::size_t du = shifted ? (u + h / 2) % h : u;
      const std::size_t dv = shifted ? (v + w / 2) % w : v;
      logmag[du * w + dv] = value;
      peak = std::max(peak, value);
    }
  }
  if (peak > 0.0)
    for (auto& v : logmag) v /= peak;
  save_image(ImageBuffer(w, h, 1, std::move(logmag)), out + ".png", ImageFormat::png);

  std::ostringstream csv;
  csv << "u,v,channel,power\n";
  char buf[40];
  for (std::size_t u = 0; u < h; ++u)
    for (std::size_t v = 0; v < w; ++v)
      for (std::size_t c = 0; c < ch; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", power.at(u, v, c));
        csv << u << ',' << v << ',' << c << ',' << buf << '\n';
      }
  write_text(out + ".csv", csv.str());
  log << "wrote " << out << ".png and " << out << ".csv\n";
  return kExitOk;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial and frequency-domain masking for training synthetic-image detectors", "freqmask"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  app.add_option("--config", "JSON file of flag values; explicit flags take precedence");

  // mask
  auto* mask_cmd = app.add_subcommand("mask", "Apply a mask to an image file");
  MaskFlags mask_flags;
  SeedFlag mask_seed;
  std::string mask_in, mask_out;
  mask_flags.add_to(*mask_cmd, true);
  mask_seed.add_to(*mask_cmd);
  mask_cmd->add_option("--in", mask_in, "Input PNG/JPEG")->required();
  mask_cmd->add_option("--out", mask_out, "Output PNG")->required();
  mask_cmd->add_option("--config", "JSON config file");

  // spectrum
  auto* spec_cmd = app.add_subcommand("spectrum", "Write log-magnitude PNG and power CSV");
  std::string spec_in, spec_out;
  bool spec_shifted = false;
  SeedFlag spec_seed;
  spec_cmd->add_option("--in", spec_in, "Input PNG/JPEG")->required();
  spec_cmd->add_option("--out", spec_out, "Output prefix (<out>.png, <out>.csv)")->required();
  spec_cmd->add_flag("--shifted", spec_shifted, "Centre DC in the heat map");
  spec_seed.add_to(*spec_cmd);
  spec_cmd->add_option("--config", "JSON config file");

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "Materialize the synthetic corpus");
  std::string corpus_out;
  CorpusConfig corpus_cfg;
  std::string corpus_train_family = "fake_grid";
  SeedFlag corpus_seed;
  corpus_cmd->add_option("--out", corpus_out, "Output directory")->required();
  corpus_cmd->add_option("--n", corpus_cfg.n_per_class, "Images per class per family")->capture_default_str();
  corpus_cmd->add_option("--size", corpus_cfg.size, "Image side")->capture_default_str();
  corpus_cmd->add_option("--train-family", corpus_train_family, "Fake family used for training")
      ->check(CLI::IsMember({"fake_grid", "fake_highcut", "fake_midnotch"}))
      ->capture_default_str();
  corpus_seed.add_to(*corpus_cmd);
  corpus_cmd->add_option("--config", "JSON config file");

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit a detector on a corpus directory");
  std::string train_in, train_out;
  TrainConfig train_cfg;
  MaskFlags train_mask;
  SeedFlag train_seed;
  train_cmd->add_option("--in", train_in, "Corpus directory")->required();
  train_cmd->add_option("--out", train_out, "Detector JSON")->required();
  train_cmd->add_option("--epochs", train_cfg.epochs, "Epochs")->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--lr", train_cfg.learning_rate, "Learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--l2", train_cfg.l2_penalty, "L2 penalty")->check(CLI::NonNegativeNumber)->capture_default_str();
  train_cmd->add_option("--blur-prob", train_cfg.augment.blur_prob, "Blur probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  train_cmd->add_option("--jpeg-prob", train_cfg.augment.jpeg_prob, "JPEG probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  train_mask.add_to(*train_cmd, false);
  train_seed.add_to(*train_cmd);
  train_cmd->add_option("--config", "JSON config file");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score a corpus test split and write per-family AP");
  std::string eval_in, eval_detector, eval_out;
  SeedFlag eval_seed;
  eval_cmd->add_option("--in", eval_in, "Corpus directory")->required();
  eval_cmd->add_option("--detector", eval_detector, "Detector JSON")->required();
  eval_cmd->add_option("--out", eval_out, "Report CSV")->required();
  eval_seed.add_to(*eval_cmd);
  eval_cmd->add_option("--config", "JSON config file");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run a comparative sweep");
  exp_cmd->require_subcommand(1);
  struct ExperimentFlags {
    std::string out;
    std::size_t seeds = 5;
    SweepConfig sweep;
    SeedFlag seed;
  } exp;
  std::string exp_which;
  for (const char* name : {"types", "ratios", "bands"}) {
    auto* sub = exp_cmd->add_subcommand(name, std::string("Sweep: ") + name);
    sub->add_option("--out", exp.out, "Report directory")->required();
    sub->add_option("--seeds", exp.seeds, "Repetitions")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--epochs", exp.sweep.train.epochs, "Epochs")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--lr", exp.sweep.train.learning_rate, "Learning rate")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--n", exp.sweep.corpus.n_per_class, "Images per class per family")->capture_default_str();
    sub->add_option("--size", exp.sweep.corpus.size, "Image side")->capture_default_str();
    sub->add_option("--threads", exp.sweep.threads, "Worker threads (0 = all cores)")->capture_default_str();
    exp.seed.add_to(*sub);
    sub->add_option("--config", "JSON config file");
    sub->callback([&exp_which, name] { exp_which = name; });
  }

  try {
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (mask_cmd->parsed()) return cmd_mask(mask_flags, mask_seed, mask_in, mask_out, out);
    if (spec_cmd->parsed()) return cmd_spectrum(spec_in, spec_out, spec_shifted, out);

    if (corpus_cmd->parsed()) {
      corpus_cfg.train_family = parse_family(corpus_train_family);
      const Corpus corpus = build_corpus(corpus_seed.resolve(), corpus_cfg);
      fs::create_directories(corpus_out);
      write_corpus(corpus, corpus_out);
      out << "wrote " << corpus.train.size() + corpus.test.size() << " images to " << corpus_out << '\n';
      return kExitOk;
    }

    if (train_cmd->parsed()) {
      train_cfg.mask = train_mask.spec();
      train_cfg.seed = train_seed.resolve();
      const Corpus corpus = read_corpus(train_in);
      const auto set = corpus.training_set();
      const LinearDetector detector = train(set, train_cfg);
      detector.save(train_out);
      out << "trained on " << set.size() << " images; wrote " << train_out << '\n';
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      const LinearDetector detector = LinearDetector::load(eval_detector);
      const Corpus corpus = read_corpus(eval_in);
      const auto families = corpus.test_families();
      const EvalReport report = evaluate(detector, families, eval_seed.resolve());
      write_text(eval_out, report.to_csv());
      out << "mAP " << report.map << "; wrote " << eval_out << '\n';
      return kExitOk;
    }

    if (exp_cmd->parsed()) {
      exp.sweep.n_seeds = exp.seeds;
      exp.sweep.master_seed = exp.seed.resolve();
      SweepReport report;
      if (exp_which == "types") report = compare_mask_types(exp.sweep);
      else if (exp_which == "ratios") report = sweep_ratios(exp.sweep);
      else report = compare_bands(exp.sweep);
      write_report(report, exp.out);
      out << "wrote " << report.runs.size() << " runs to " << exp.out << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << "usage error: no subcommand\n";
  return kExitUsage;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(std::move(args), std::cout, std::cerr);
}

}  // namespace freqmask
