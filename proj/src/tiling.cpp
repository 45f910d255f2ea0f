#include "dnbench/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <string>

#include "dnbench/error.hpp"

namespace dnb {

std::string_view to_string(Blend blend) noexcept {
  return blend == Blend::hann ? "hann" : "uniform";
}

Blend parse_blend(std::string_view text) {
  if (text == "uniform") return Blend::uniform;
  if (text == "hann") return Blend::hann;
  throw Error(Errc::invalid_argument, "unknown blend '" + std::string(text) + "'");
}

void TileSpec::validate() const {
  if (window < 8 || window % 8 != 0) {
    throw Error(Errc::invalid_argument,
                "tile window must be a positive multiple of 8, got " + std::to_string(window));
  }
  if (overlap < 0 || overlap >= window) {
    throw Error(Errc::invalid_argument, "tile overlap must satisfy 0 <= overlap < window");
  }
}

std::vector<int> tile_origins(int extent, int window, int overlap) {
  if (window >= extent) return {0};
  const int stride = window - overlap;
  std::vector<int> out;
  for (int p = 0; p + window < extent; p += stride) out.push_back(p);
  out.push_back(extent - window);
  return out;
}

std::vector<Rect> plan_tiles(int width, int height, const TileSpec& spec) {
  spec.validate();
  const auto xs = tile_origins(width, spec.window, spec.overlap);
  const auto ys = tile_origins(height, spec.window, spec.overlap);
  const int tw = std::min(spec.window, width);
  const int th = std::min(spec.window, height);
  std::vector<Rect> tiles;
  tiles.reserve(xs.size() * ys.size());
  for (int y : ys) {
    for (int x : xs) tiles.push_back(Rect{x, y, tw, th});
  }
  return tiles;
}

std::vector<double> blend_weights_1d(int n, Blend blend) {
  std::vector<double> w(n, 1.0);
  if (blend == Blend::hann) {
    for (int i = 0; i < n; ++i) {
      const double s = std::sin(std::numbers::pi * (i + 0.5) / n);
      w[i] = std::max(s * s, 1e-3);
    }
  }
  return w;
}

TileBlender::TileBlender(int width, int height, int channels, Blend blend)
    : width_(width),
      height_(height),
      channels_(channels),
      blend_(blend),
      value_(static_cast<std::size_t>(width) * height * channels, 0.0),
      weight_(static_cast<std::size_t>(width) * height, 0.0) {}

void TileBlender::add(const Rect& r, const Image& pred) {
  if (pred.width() != r.w || pred.height() != r.h || pred.channels() != channels_) {
    throw Error(Errc::shape_mismatch, "tile prediction does not match its rectangle");
  }
  const auto wx = blend_weights_1d(r.w, blend_);
  const auto wy = blend_weights_1d(r.h, blend_);
  const std::size_t plane = static_cast<std::size_t>(width_) * height_;
  for (int y = 0; y < r.h; ++y) {
    for (int x = 0; x < r.w; ++x) {
      const double w = wx[x] * wy[y];
      const std::size_t p = static_cast<std::size_t>(r.y0 + y) * width_ + r.x0 + x;
      weight_[p] += w;
      for (int c = 0; c < channels_; ++c) value_[c * plane + p] += w * pred.at(c, y, x);
    }
  }
  rects_.push_back(r);
}

Image TileBlender::finish() const {
  Image out(width_, height_, channels_);
  const std::size_t plane = static_cast<std::size_t>(width_) * height_;
  auto dst = out.data();
  for (int c = 0; c < channels_; ++c) {
    for (std::size_t p = 0; p < plane; ++p) {
      dst[c * plane + p] = static_cast<float>(value_[c * plane + p] / weight_[p]);
    }
  }
  return out;
}

Image TileBlender::partition_of_unity() const {
  std::vector<double> sum(static_cast<std::size_t>(width_) * height_, 0.0);
  for (const Rect& r : rects_) {
    const auto wx = blend_weights_1d(r.w, blend_);
    const auto wy = blend_weights_1d(r.h, blend_);
    for (int y = 0; y < r.h; ++y) {
      for (int x = 0; x < r.w; ++x) {
        const std::size_t p = static_cast<std::size_t>(r.y0 + y) * width_ + r.x0 + x;
        sum[p] += wx[x] * wy[y] / weight_[p];
      }
    }
  }
  std::vector<float> data(sum.begin(), sum.end());
  return Image(width_, height_, 1, std::move(data));
}

Image tiled_denoise(const DenoiseFn& f, const Image& x, const TileSpec& spec) {
  spec.validate();
  if (spec.window >= std::max(x.width(), x.height())) return f(x);

  const auto tiles = plan_tiles(x.width(), x.height(), spec);
  const int n = static_cast<int>(tiles.size());
  std::vector<Image> preds(n);
  std::vector<std::exception_ptr> failures(n);

#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    const Rect& r = tiles[i];
    const std::string tag = "tile (" + std::to_string(r.x0) + "," + std::to_string(r.y0) + "," +
                            std::to_string(r.w) + "," + std::to_string(r.h) + "): ";
    try {
      preds[i] = f(crop(x, r));
      if (preds[i].width() != r.w || preds[i].height() != r.h ||
          preds[i].channels() != x.channels()) {
        throw Error(Errc::shape_mismatch, "denoiser changed the tile shape");
      }
    } catch (const Error& e) {
      failures[i] = std::make_exception_ptr(Error(e.code(), tag + e.what()));
    } catch (const std::exception& e) {
      failures[i] = std::make_exception_ptr(Error(Errc::backend_failed, tag + e.what()));
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  TileBlender blender(x.width(), x.height(), x.channels(), spec.blend);
  for (int i = 0; i < n; ++i) blender.add(tiles[i], preds[i]);
  return blender.finish();
}

Image tile_partition_of_unity(int width, int height, const TileSpec& spec) {
  TileBlender blender(width, height, 1, spec.blend);
  for (const Rect& r : plan_tiles(width, height, spec)) {
    blender.add(r, Image(r.w, r.h, 1, 1.0f));
  }
  return blender.partition_of_unity();
}

}  // namespace dnb
