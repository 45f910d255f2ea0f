#include "synth.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <stdexcept>

#include "dnbench/image_io.hpp"

namespace dnb::test {

Image random_image(int w, int h, int c, std::uint64_t seed, float lo, float hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(lo, hi);
  Image img(w, h, c);
  for (float& v : img.data()) v = dist(rng);
  return img;
}

Image piecewise_smooth(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(w, h, 3);
  for (int c = 0; c < 3; ++c) {
    const double fx = 1.0 + 2.0 * u(rng);
    const double fy = 1.0 + 2.0 * u(rng);
    const double ph = 6.28 * u(rng);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double s = std::sin(fx * 3.14159 * x / w + ph) * std::cos(fy * 3.14159 * y / h);
        img.at(c, y, x) = static_cast<float>(0.5 + 0.3 * s);
      }
    }
  }
  for (int r = 0; r < 3; ++r) {
    const int x0 = static_cast<int>(u(rng) * w * 0.6);
    const int y0 = static_cast<int>(u(rng) * h * 0.6);
    const int rw = std::max(2, static_cast<int>(w * (0.15 + 0.2 * u(rng))));
    const int rh = std::max(2, static_cast<int>(h * (0.15 + 0.2 * u(rng))));
    for (int c = 0; c < 3; ++c) {
      const float v = static_cast<float>(0.1 + 0.8 * u(rng));
      for (int y = y0; y < std::min(h, y0 + rh); ++y) {
        for (int x = x0; x < std::min(w, x0 + rw); ++x) img.at(c, y, x) = v;
      }
    }
  }
  return img;
}

Image ramp_image(int w, int h, int c, float scale) {
  Image img(w, h, c);
  for (int k = 0; k < c; ++k) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) img.at(k, y, x) = (k * 1000.0f + y * w + x) / scale;
    }
  }
  return img;
}

Image constant_image(int w, int h, int c, float v) { return Image(w, h, c, v); }

Image delta_image(int w, int h, int c, int x, int y) {
  Image img(w, h, c);
  for (int k = 0; k < c; ++k) img.at(k, y, x) = 1.0f;
  return img;
}

TempDir::TempDir(const std::string& tag) {
  std::string templ = (std::filesystem::temp_directory_path() / (tag + "-XXXXXX")).string();
  if (!::mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
  path_ = templ;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_corpus(const std::filesystem::path& dir, int count, int w, int h, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "img_%03d.png", i);
    save_png(piecewise_smooth(w, h, seed * 1000 + i), dir / name, 8);
  }
}

std::filesystem::path data_dir() { return DNB_TEST_DATA_DIR; }

}  // namespace dnb::test
