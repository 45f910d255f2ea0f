#pragma once

#include <string_view>
#include <vector>

#include "dnbench/ensemble.hpp"
#include "dnbench/image.hpp"

namespace dnb {

enum class Blend { uniform, hann };

std::string_view to_string(Blend blend) noexcept;
Blend parse_blend(std::string_view text);

struct TileSpec {
  int window = 768;  ///< square window side; multiple of 8
  int overlap = 64;  ///< 0 <= overlap < window
  Blend blend = Blend::hann;

  void validate() const;
  bool operator==(const TileSpec&) const = default;
};

/// Window origins along one axis: 0, stride, 2*stride, ... with the final
/// window aligned to the far edge. A single origin 0 when window >= extent.
std::vector<int> tile_origins(int extent, int window, int overlap);

/// Row-major tile rectangles; tiles are clamped to the image when the window
/// exceeds an image dimension.
std::vector<Rect> plan_tiles(int width, int height, const TileSpec& spec);

/// Per-sample blend weight along one tile axis of length n. Uniform is 1;
/// hann is max(sin^2(pi * (i + 0.5) / n), 1e-3).
std::vector<double> blend_weights_1d(int n, Blend blend);

/// Accumulates tile predictions with separable blend weights and normalizes
/// by the per-pixel weight total.
class TileBlender {
 public:
  TileBlender(int width, int height, int channels, Blend blend);

  void add(const Rect& rect, const Image& prediction);
  Image finish() const;

  /// Sum over added tiles of w_t(p) / W(p), where W is the weight total.
  /// Equals 1 wherever the tiles cover the image.
  Image partition_of_unity() const;

 private:
  int width_;
  int height_;
  int channels_;
  Blend blend_;
  std::vector<Rect> rects_;
  std::vector<double> value_;
  std::vector<double> weight_;
};

/// Windowed inference: when window >= max(width, height) the result is
/// exactly f(x). Otherwise f runs on every planned tile (tiles may run
/// concurrently) and predictions are blended in tile order. Backend
/// failures are rethrown tagged with the tile rectangle.
Image tiled_denoise(const DenoiseFn& f, const Image& x, const TileSpec& spec);

/// Blend-weight partition of unity over the tile plan for a width x height
/// image, computed with the same blender the wrapper uses.
Image tile_partition_of_unity(int width, int height, const TileSpec& spec);

}  // namespace dnb
