#include <json.hpp>

#include <fstream>
#include <sstream>

#include "freqmask/synth_data.hpp"

namespace freqmask {

namespace fs = std::filesystem;

namespace {

constexpr int kManifestVersion = 1;

std::string relative_path(const CorpusImage& img) {
  return std::string(to_string(img.split)) + "/" + std::string(to_string(img.family)) + "/" +
         std::to_string(img.index) + ".png";
}

}  // namespace

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  nlohmann::json manifest;
  manifest["format_version"] = kManifestVersion;
  manifest["master_seed"] = corpus.master_seed;
  manifest["size"] = corpus.config.size;
  manifest["n_per_class"] = corpus.config.n_per_class;
  manifest["spectral_slope"] = corpus.config.spectral_slope;
  manifest["train_family"] = std::string(to_string(corpus.config.train_family));
  manifest["strengths"] = {{"fake_grid", corpus.config.strengths.grid},
                           {"fake_highcut", corpus.config.strengths.highcut},
                           {"fake_midnotch", corpus.config.strengths.midnotch}};
  nlohmann::json images = nlohmann::json::array();

  for (const auto* split : {&corpus.train, &corpus.test}) {
    for (const auto& img : *split) {
      const std::string rel = relative_path(img);
      fs::create_directories((dir / rel).parent_path());
      save_image(img.image, dir / rel, ImageFormat::png);
      images.push_back({{"split", std::string(to_string(img.split))},
                        {"family", std::string(to_string(img.family))},
                        {"index", img.index},
                        {"seed", img.seed},
                        {"path", rel}});
    }
  }
  manifest["images"] = std::move(images);

  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write corpus manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

Corpus read_corpus(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("corpus manifest: ") + e.what());
  }
  if (manifest.value("format_version", 0) != kManifestVersion)
    throw std::runtime_error("unsupported corpus manifest version");

  Corpus corpus;
  try {
    corpus.master_seed = manifest.at("master_seed").get<std::uint64_t>();
    corpus.config.size = manifest.at("size").get<std::size_t>();
    corpus.config.n_per_class = manifest.at("n_per_class").get<std::size_t>();
    corpus.config.spectral_slope = manifest.at("spectral_slope").get<double>();
    corpus.config.train_family = parse_family(manifest.at("train_family").get<std::string>());
    const auto& st = manifest.at("strengths");
    corpus.config.strengths.grid = st.at("fake_grid").get<double>();
    corpus.config.strengths.highcut = st.at("fake_highcut").get<double>();
    corpus.config.strengths.midnotch = st.at("fake_midnotch").get<double>();
    for (const auto& entry : manifest.at("images")) {
      CorpusImage img;
      img.split = entry.at("split").get<std::string>() == "train" ? Split::train : Split::test;
      img.family = parse_family(entry.at("family").get<std::string>());
      img.index = entry.at("index").get<std::size_t>();
      img.seed = entry.at("seed").get<std::uint64_t>();
      img.image = load_image(dir / entry.at("path").get<std::string>());
      (img.split == Split::train ? corpus.train : corpus.test).push_back(std::move(img));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("corpus manifest: ") + e.what());
  }
  return corpus;
}

}  // namespace freqmask
