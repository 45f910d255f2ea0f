#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dnb {

struct Rect {
  int x0 = 0;
  int y0 = 0;
  int w = 1;
  int h = 1;

  bool operator==(const Rect&) const = default;
};

/// Planar floating-point raster. Samples are stored channel-major, row-major
/// within a channel: index = (c * height + y) * width + x. The nominal range
/// is [0,1], but out-of-range values are legal intermediates (noisy inputs
/// routinely exceed it) and are only clamped on PNG export.
class Image {
 public:
  /// Empty 0x0 image; only useful as a moved-from or placeholder value.
  Image() = default;
  Image(int width, int height, int channels, float fill = 0.0f);
  Image(int width, int height, int channels, std::vector<float> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  std::span<float> plane(int c) noexcept { return {data_.data() + c * plane_size(), plane_size()}; }
  std::span<const float> plane(int c) const noexcept {
    return {data_.data() + c * plane_size(), plane_size()};
  }

  float* row(int c, int y) noexcept { return data_.data() + index(c, y, 0); }
  const float* row(int c, int y) const noexcept { return data_.data() + index(c, y, 0); }

  float& at(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }
  float at(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }

  std::size_t index(int c, int y, int x) const noexcept {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

bool same_shape(const Image& a, const Image& b) noexcept;

/// Compares sample bit patterns, so NaNs with equal payloads compare equal
/// and +0/-0 do not.
bool bit_equal(const Image& a, const Image& b) noexcept;

/// Hex FNV-1a digest of shape and sample bits; used to prove two pipeline
/// stages saw the same pixels.
std::string digest(const Image& img);

Image crop(const Image& img, const Rect& rect);

/// Overwrites dst with src at (x0, y0). Channel counts must match.
void paste(Image& dst, const Image& src, int x0, int y0);

/// Top-left anchored crop to (floor(w/m)*m) x (floor(h/m)*m).
Image crop_to_multiple(const Image& img, int m);

/// Copy with every sample clamped to [0,1] and rounded half-up to 2^depth-1
/// levels, then mapped back to [0,1].
Image quantize(const Image& img, int depth);

}  // namespace dnb
