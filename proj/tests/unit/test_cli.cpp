#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "freqmask/cli.hpp"
#include "freqmask/detector.hpp"
#include "freqmask/experiment.hpp"
#include "freqmask/image.hpp"

using namespace freqmask;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

fs::path workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "freqmask_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string input_png() {
  const auto path = workdir() / "in.png";
  if (!fs::exists(path)) {
    RandomStream s(1);
    std::vector<double> data(20 * 18 * 3);
    for (auto& v : data) v = s.uniform_real();
    save_image(ImageBuffer(20, 18, 3, std::move(data)), path);
  }
  return path.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_count(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("mask is deterministic under --seed") {
  const auto a = (workdir() / "a.png").string();
  const auto b = (workdir() / "b.png").string();
  const std::vector<std::string> base{"mask", "--kind", "frequency", "--band", "all", "--ratio", "0.15", "--seed", "7",
                                      "--in", input_png(), "--out"};
  auto args = base;
  args.push_back(a);
  CHECK(cli(args).code == 0);
  args.back() = b;
  CHECK(cli(args).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(!slurp(a).empty());

  const auto c = (workdir() / "c.png").string();
  CHECK(cli({"mask", "--kind", "patch", "--patch-size", "4", "--ratio", "0.5", "--seed", "3", "--in", input_png(), "--out",
             c})
            .code == 0);
  CHECK(load_image(c).width() == 20);
}

TEST_CASE("usage errors exit 1 with a one-line diagnostic") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"mask", "--kind", "frequency", "--ratio", "1.5", "--in", "x.png", "--out", "y.png"},
           {"mask", "--kind", "pixel", "--band", "low", "--in", "x.png", "--out", "y.png"},
           {"mask", "--kind", "frequency", "--patch-size", "4", "--in", "x.png", "--out", "y.png"},
           {"mask", "--kind", "pixel", "--symmetric", "--in", "x.png", "--out", "y.png"},
           {"mask", "--kind", "voxel", "--in", "x.png", "--out", "y.png"},
           {"mask", "--kind", "pixel", "--bogus", "--in", "x.png", "--out", "y.png"},
           {"mask", "--kind", "pixel"},
           {"experiment"},
           {"nonsense"},
           {},
       }) {
    const auto r = cli(args);
    CHECK(r.code == 1);
    CHECK(line_count(r.err) == 1);
  }
}

TEST_CASE("runtime errors exit 2") {
  const auto r = cli({"mask", "--kind", "pixel", "--in", (workdir() / "missing.png").string(), "--out",
                      (workdir() / "x.png").string()});
  CHECK(r.code == 2);
  CHECK(line_count(r.err) == 1);
}

TEST_CASE("help lists the flags") {
  const auto r = cli({"mask", "--help"});
  CHECK(r.code == 0);
  for (const char* flag : {"--kind", "--ratio", "--patch-size", "--band", "--symmetric", "--shifted", "--seed", "--in",
                           "--out", "--config"})
    CHECK(r.out.find(flag) != std::string::npos);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("spectrum writes a heat map and a power table") {
  const auto prefix = (workdir() / "spec").string();
  REQUIRE(cli({"spectrum", "--in", input_png(), "--out", prefix}).code == 0);
  const auto heat = load_image(prefix + ".png");
  CHECK(heat.width() == 20);
  CHECK(heat.height() == 18);
  const auto csv = slurp(prefix + ".csv");
  CHECK(csv.rfind("u,v,channel,power\n", 0) == 0);
  CHECK(line_count(csv) == 1 + 20 * 18 * 3);
}

TEST_CASE("config file fills flags that were not given") {
  const auto cfg = workdir() / "mask.json";
  std::ofstream(cfg) << R"({"kind": "pixel", "ratio": 0.5, "seed": 4})";
  const auto a = (workdir() / "cfg_a.png").string();
  const auto b = (workdir() / "cfg_b.png").string();
  const auto c = (workdir() / "cfg_c.png").string();
  REQUIRE(cli({"mask", "--config", cfg.string(), "--in", input_png(), "--out", a}).code == 0);
  REQUIRE(cli({"mask", "--kind", "pixel", "--ratio", "0.5", "--seed", "4", "--in", input_png(), "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  // explicit flags win over the file
  REQUIRE(cli({"mask", "--config", cfg.string(), "--seed", "5", "--in", input_png(), "--out", c}).code == 0);
  CHECK(slurp(a) != slurp(c));

  std::ofstream(workdir() / "bad.json") << "{not json";
  CHECK(cli({"mask", "--config", (workdir() / "bad.json").string(), "--in", input_png(), "--out", a}).code == 1);
}

TEST_CASE("seed falls back to FREQMASK_SEED") {
  const auto a = (workdir() / "env_a.png").string();
  const auto b = (workdir() / "env_b.png").string();
  setenv("FREQMASK_SEED", "11", 1);
  REQUIRE(cli({"mask", "--kind", "pixel", "--ratio", "0.3", "--in", input_png(), "--out", a}).code == 0);
  unsetenv("FREQMASK_SEED");
  REQUIRE(cli({"mask", "--kind", "pixel", "--ratio", "0.3", "--seed", "11", "--in", input_png(), "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  setenv("FREQMASK_SEED", "eleven", 1);
  CHECK(cli({"mask", "--kind", "pixel", "--ratio", "0.3", "--in", input_png(), "--out", a}).code == 1);
  unsetenv("FREQMASK_SEED");
}

TEST_CASE("corpus, train and eval chain together") {
  const auto corpus = (workdir() / "corpus").string();
  REQUIRE(cli({"corpus", "--out", corpus, "--seed", "2", "--n", "10", "--size", "16"}).code == 0);
  CHECK(fs::exists(fs::path(corpus) / "manifest.json"));

  const auto det = (workdir() / "det.json").string();
  REQUIRE(cli({"train", "--in", corpus, "--out", det, "--epochs", "3", "--kind", "frequency", "--ratio", "0.15", "--seed",
               "1"})
              .code == 0);
  const auto detector = LinearDetector::load(det);
  CHECK(detector.fitted());

  const auto report = (workdir() / "eval.csv").string();
  REQUIRE(cli({"eval", "--in", corpus, "--detector", det, "--out", report, "--seed", "0"}).code == 0);
  const auto csv = slurp(report);
  CHECK(csv.rfind("family,ap,n_real,n_fake\n", 0) == 0);
  CHECK(csv.find("fake_midnotch,") != std::string::npos);
  CHECK(csv.find("mAP,") != std::string::npos);

  CHECK(cli({"train", "--in", corpus, "--out", det, "--band", "low"}).code == 1);
  CHECK(cli({"eval", "--in", corpus, "--detector", (workdir() / "nope.json").string(), "--out", report}).code == 2);
}

TEST_CASE("experiment writes parseable reports") {
  const auto dir = workdir() / "report";
  REQUIRE(cli({"experiment", "ratios", "--seeds", "2", "--out", dir.string(), "--n", "10", "--size", "16", "--epochs",
               "2", "--seed", "3"})
              .code == 0);
  for (const char* name : {"raw.csv", "aggregate.csv", "summary.md"}) CHECK(fs::exists(dir / name));
  const auto runs = parse_raw_csv(slurp(dir / "raw.csv"));
  CHECK(runs.size() == 10);
  CHECK(line_count(slurp(dir / "aggregate.csv")) == 6);
}
