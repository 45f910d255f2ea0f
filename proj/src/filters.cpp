#include "dnbench/filters.hpp"

#include <cmath>

#include "dnbench/error.hpp"

namespace dnb {

std::vector<double> gaussian_taps(double stddev, int radius) {
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    const double v = std::exp(-0.5 * k * k / (stddev * stddev));
    taps[k + radius] = v;
    sum += v;
  }
  for (double& v : taps) v /= sum;
  return taps;
}

namespace {

Image convolve_rows(const Image& img, const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size()) / 2;
  const int w = img.width();
  Image out(w, img.height(), img.channels());
  const int rows = img.channels() * img.height();
#pragma omp parallel for schedule(static)
  for (int cy = 0; cy < rows; ++cy) {
    const int c = cy / img.height();
    const int y = cy % img.height();
    const float* src = img.row(c, y);
    float* dst = out.row(c, y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * src[reflect_index(x + k, w)];
      dst[x] = static_cast<float>(acc);
    }
  }
  return out;
}

Image convolve_cols(const Image& img, const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size()) / 2;
  const int h = img.height();
  const int w = img.width();
  Image out(w, h, img.channels());
  const int rows = img.channels() * h;
#pragma omp parallel for schedule(static)
  for (int cy = 0; cy < rows; ++cy) {
    const int c = cy / h;
    const int y = cy % h;
    float* dst = out.row(c, y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += taps[k + r] * img.at(c, reflect_index(y + k, h), x);
      dst[x] = static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace

Image gaussian_blur(const Image& img, double stddev) {
  if (!(stddev >= 0.0) || !std::isfinite(stddev)) {
    throw Error(Errc::invalid_argument, "gaussian_blur std must be finite and >= 0");
  }
  if (stddev == 0.0) return img;
  const auto taps = gaussian_taps(stddev, static_cast<int>(std::ceil(3.0 * stddev)));
  return convolve_cols(convolve_rows(img, taps), taps);
}

Image hbox_blur(const Image& img, int radius) {
  if (radius < 0) throw Error(Errc::invalid_argument, "hbox_blur radius must be >= 0");
  return convolve_rows(img, std::vector<double>(2 * radius + 1, 1.0 / (2 * radius + 1)));
}

}  // namespace dnb
