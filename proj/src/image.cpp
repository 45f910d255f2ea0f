#include "dnbench/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "dnbench/error.hpp"
#include "dnbench/noise.hpp"

namespace dnb {

namespace {

void check_dims(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw Error(Errc::invalid_argument, "image dimensions must be >= 1, got " +
                                            std::to_string(width) + "x" + std::to_string(height));
  }
  if (channels < 1) {
    throw Error(Errc::invalid_argument, "image must have at least one channel");
  }
}

void check_rect(const Image& img, const Rect& r) {
  if (r.x0 < 0 || r.y0 < 0 || r.w < 1 || r.h < 1 || r.x0 + r.w > img.width() ||
      r.y0 + r.h > img.height()) {
    throw Error(Errc::out_of_bounds,
                "rect (" + std::to_string(r.x0) + "," + std::to_string(r.y0) + "," +
                    std::to_string(r.w) + "," + std::to_string(r.h) + ") outside " +
                    std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
}

}  // namespace

Image::Image(int width, int height, int channels, float fill) {
  check_dims(width, height, channels);
  width_ = width;
  height_ = height;
  channels_ = channels;
  data_.assign(plane_size() * static_cast<std::size_t>(channels), fill);
}

Image::Image(int width, int height, int channels, std::vector<float> data) {
  check_dims(width, height, channels);
  width_ = width;
  height_ = height;
  channels_ = channels;
  if (data.size() != plane_size() * static_cast<std::size_t>(channels)) {
    throw Error(Errc::shape_mismatch, "sample count " + std::to_string(data.size()) +
                                          " does not match " + std::to_string(width) + "x" +
                                          std::to_string(height) + "x" + std::to_string(channels));
  }
  data_ = std::move(data);
}

bool same_shape(const Image& a, const Image& b) noexcept {
  return a.width() == b.width() && a.height() == b.height() && a.channels() == b.channels();
}

bool bit_equal(const Image& a, const Image& b) noexcept {
  if (!same_shape(a, b)) return false;
  return a.size() == 0 ||
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
}

std::string digest(const Image& img) {
  std::uint64_t h = fnv1a64_init();
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(img.width()),
                                 static_cast<std::uint32_t>(img.height()),
                                 static_cast<std::uint32_t>(img.channels())};
  for (std::uint32_t d : dims) {
    for (int b = 0; b < 4; ++b) h = fnv1a64_update(h, static_cast<std::uint8_t>(d >> (8 * b)));
  }
  for (float v : img.data()) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) h = fnv1a64_update(h, static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Image crop(const Image& img, const Rect& rect) {
  check_rect(img, rect);
  Image out(rect.w, rect.h, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < rect.h; ++y) {
      const float* src = img.row(c, rect.y0 + y) + rect.x0;
      std::copy(src, src + rect.w, out.row(c, y));
    }
  }
  return out;
}

void paste(Image& dst, const Image& src, int x0, int y0) {
  if (src.channels() != dst.channels()) {
    throw Error(Errc::shape_mismatch, "paste channel count mismatch");
  }
  check_rect(dst, Rect{x0, y0, src.width(), src.height()});
  for (int c = 0; c < src.channels(); ++c) {
    for (int y = 0; y < src.height(); ++y) {
      const float* s = src.row(c, y);
      std::copy(s, s + src.width(), dst.row(c, y0 + y) + x0);
    }
  }
}

Image crop_to_multiple(const Image& img, int m) {
  if (m < 1) throw Error(Errc::invalid_argument, "crop multiple must be >= 1");
  const int w = img.width() / m * m;
  const int h = img.height() / m * m;
  if (w < 1 || h < 1) {
    throw Error(Errc::too_small, std::to_string(img.width()) + "x" +
                                     std::to_string(img.height()) + " is smaller than multiple " +
                                     std::to_string(m));
  }
  if (w == img.width() && h == img.height()) return img;
  return crop(img, Rect{0, 0, w, h});
}

Image quantize(const Image& img, int depth) {
  if (depth != 8 && depth != 16) throw Error(Errc::invalid_argument, "depth must be 8 or 16");
  const double levels = depth == 8 ? 255.0 : 65535.0;
  Image out = img;
  for (float& v : out.data()) {
    const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
    v = static_cast<float>(std::floor(c * levels + 0.5) / levels);
  }
  return out;
}

}  // namespace dnb
