#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "freqmask/image.hpp"

using namespace freqmask;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "freqmask_test_image";
  fs::create_directories(dir);
  return dir;
}

ImageBuffer random_image(std::size_t w, std::size_t h, std::size_t c, std::uint64_t seed) {
  RandomStream s(seed);
  std::vector<double> data(w * h * c);
  for (auto& v : data) v = s.uniform_real();
  return ImageBuffer(w, h, c, std::move(data));
}

ImageBuffer random_8bit(std::size_t w, std::size_t h, std::size_t c, std::uint64_t seed) {
  RandomStream s(seed);
  std::vector<double> data(w * h * c);
  for (auto& v : data) v = static_cast<double>(s.uniform_int(0, 255)) / 255.0;
  return ImageBuffer(w, h, c, std::move(data));
}

double mean_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) sum += std::abs(a.data()[i] - b.data()[i]);
  return sum / static_cast<double>(a.data().size());
}

double total_variation(const ImageBuffer& img) {
  double tv = 0.0;
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x)
      for (std::size_t c = 0; c < img.channels(); ++c) {
        if (x + 1 < img.width()) tv += std::abs(img.at(y, x + 1, c) - img.at(y, x, c));
        if (y + 1 < img.height()) tv += std::abs(img.at(y + 1, x, c) - img.at(y, x, c));
      }
  return tv;
}

}  // namespace

TEST_CASE("construction clamps and validates") {
  ImageBuffer img(2, 1, 1, std::vector<double>{-0.5, 1.5});
  CHECK(img.at(0, 0, 0) == 0.0);
  CHECK(img.at(0, 1, 0) == 1.0);
  CHECK_THROWS_AS(ImageBuffer(2, 2, 1, std::vector<double>{0.0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(ImageBuffer(1, 1, 1, std::vector<double>{std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(ImageBuffer(1, 1, 2), std::invalid_argument);
}

TEST_CASE("8-bit PNG decodes to v/255") {
  const unsigned char gray[] = {0, 255, 128, 64};
  // build the reference PNG through the encoder from exact 8-bit levels
  ImageBuffer img(2, 2, 1, std::vector<double>{0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0});
  const auto path = temp_dir() / "2x2.png";
  save_image(img, path);
  const auto back = load_image(path);
  REQUIRE(back.width() == 2);
  REQUIRE(back.height() == 2);
  REQUIRE(back.channels() == 1);
  for (int i = 0; i < 4; ++i) CHECK(back.data()[i] == static_cast<double>(gray[i]) / 255.0);
}

TEST_CASE("missing and corrupt files are reported distinctly") {
  CHECK_THROWS_AS(load_image(temp_dir() / "does_not_exist.png"), ImageNotFoundError);

  const auto junk = temp_dir() / "junk.png";
  std::ofstream(junk) << "definitely not an image";
  CHECK_THROWS_AS(load_image(junk), UnsupportedFormatError);

  auto bytes = encode_png(random_image(8, 8, 3, 1));
  bytes.resize(bytes.size() / 2);
  CHECK_THROWS_AS(decode_image(bytes), CorruptImageError);

  CHECK_THROWS_AS(save_image(ImageBuffer(2, 2, 1), "/nonexistent_dir/x/y.png"), ImageWriteError);
}

TEST_CASE("PNG roundtrip is exact on 8-bit images and within 1/510 otherwise") {
  for (std::size_t c : {1u, 3u}) {
    const auto q = random_8bit(13, 7, c, 40 + c);
    CHECK(decode_image(encode_png(q)) == q);

    const auto r = random_image(13, 7, c, 50 + c);
    const auto back = decode_image(encode_png(r));
    for (std::size_t i = 0; i < r.data().size(); ++i) CHECK(std::abs(back.data()[i] - r.data()[i]) <= 1.0 / 510.0 + 1e-12);
  }
  const ImageBuffer zeros(4, 4, 1);
  CHECK(decode_image(encode_png(zeros)) == zeros);
}

TEST_CASE("quantization rounds half up") {
  CHECK(quantize_8bit(0.0) == 0);
  CHECK(quantize_8bit(1.0) == 255);
  CHECK(quantize_8bit(0.5) == 128);  // 127.5 rounds up
  CHECK(quantize_8bit(1.0 / 510.0) == 1);
}

TEST_CASE("JPEG roundtrip at quality 95 is close") {
  const auto img = random_image(32, 32, 3, 3);
  const auto path = temp_dir() / "q95.jpg";
  save_image(img, path, ImageFormat::jpeg, 95);
  const auto back = load_image(path);
  CHECK(back.width() == 32);
  CHECK(mean_abs_diff(img, back) < 0.05);
  CHECK_FALSE(back == img);
}

TEST_CASE("gaussian kernel sums to one") {
  for (double sigma = 0.1; sigma <= 5.0; sigma += 0.1) {
    const auto k = gaussian_kernel(sigma);
    CHECK(k.size() == 2 * static_cast<std::size_t>(std::ceil(3 * sigma)) + 1);
    double sum = 0.0;
    for (double v : k) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-6);
  }
}

TEST_CASE("gaussian blur") {
  const ImageBuffer flat(9, 7, 3, 0.3);
  const auto blurred_flat = gaussian_blur(flat, 1.7);
  for (double v : blurred_flat.data()) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));

  ImageBuffer impulse(9, 9, 1);
  impulse.set(4, 4, 0, 1.0);
  const auto k = gaussian_kernel(1.0);
  const auto b = gaussian_blur(impulse, 1.0);
  const double peak = k[k.size() / 2];
  CHECK(b.at(4, 4, 0) == doctest::Approx(peak * peak).epsilon(1e-12));

  CHECK_THROWS_AS(gaussian_blur(flat, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_blur(flat, -1.0), std::invalid_argument);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto img = random_image(20, 16, 1 + 2 * (seed % 2), seed);
    CHECK(total_variation(gaussian_blur(img, 0.5 + 0.3 * static_cast<double>(seed))) <= total_variation(img));
  }
}

TEST_CASE("jpeg_compress") {
  const ImageBuffer gray(16, 16, 3, 0.5);
  CHECK(mean_abs_diff(gray, jpeg_compress(gray, 100)) < 0.01);

  for (auto [w, h] : {std::pair<std::size_t, std::size_t>{17, 23}, {64, 64}, {224, 224}}) {
    const auto out = jpeg_compress(random_image(w, h, 3, w), 75);
    CHECK(out.width() == w);
    CHECK(out.height() == h);
    CHECK(out.channels() == 3);
  }

  const auto textured = random_image(64, 64, 3, 99);
  CHECK(mean_abs_diff(textured, jpeg_compress(textured, 10)) > mean_abs_diff(textured, jpeg_compress(textured, 95)));
  CHECK_THROWS_AS(jpeg_compress(textured, 0), std::invalid_argument);
  CHECK_THROWS_AS(jpeg_compress(textured, 101), std::invalid_argument);
}

TEST_CASE("augment") {
  const auto img = random_image(16, 16, 3, 5);
  RandomStream s(1);

  AugmentSettings off;
  off.blur_prob = 0.0;
  off.jpeg_prob = 0.0;
  CHECK(augment(img, s, off) == img);

  AugmentSettings blur_only = off;
  blur_only.blur_prob = 1.0;
  blur_only.sigma_range = {1.25, 1.25};
  CHECK(augment(img, s, blur_only) == gaussian_blur(img, 1.25));

  RandomStream a(77), b(77);
  const AugmentSettings both{1.0, 1.0, {0.5, 2.0}, {40, 90}};
  CHECK(augment(img, a, both) == augment(img, b, both));

  AugmentSettings bad;
  bad.blur_prob = 1.5;
  CHECK_THROWS_AS(augment(img, s, bad), std::invalid_argument);
  bad = {};
  bad.sigma_range = {2.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.quality_range = {50, 101};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("augment plan frequencies") {
  RandomStream s(123);
  const AugmentSettings settings;
  int blurs = 0, jpegs = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto plan = plan_augment(s, settings);
    // a drawn sigma of exactly 0 is a skipped blur; with a continuous draw this never happens
    if (plan.blur_sigma) {
      ++blurs;
      CHECK(*plan.blur_sigma >= 0.0);
      CHECK(*plan.blur_sigma <= 3.0);
    }
    if (plan.jpeg_quality) {
      ++jpegs;
      CHECK(*plan.jpeg_quality >= 30);
      CHECK(*plan.jpeg_quality <= 100);
    }
  }
  CHECK(std::abs(blurs / static_cast<double>(draws) - 0.1) <= 0.01);
  CHECK(std::abs(jpegs / static_cast<double>(draws) - 0.1) <= 0.01);
}
