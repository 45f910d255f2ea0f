#pragma once

#include <span>
#include <vector>

#include "dnbench/image.hpp"

namespace dnb {

/// Orthonormal DCT-II basis of size n: row k is
/// alpha_k * cos(pi * (2i + 1) * k / (2n)), alpha_0 = sqrt(1/n), else sqrt(2/n).
/// Holds a scratch buffer, so give each thread its own instance.
class DctBasis {
 public:
  explicit DctBasis(int n);

  int size() const noexcept { return n_; }
  double at(int k, int i) const noexcept { return m_[static_cast<std::size_t>(k) * n_ + i]; }

  /// Separable 2-D transforms of an n x n row-major block, in place.
  void forward(std::span<double> block) const;
  void inverse(std::span<double> block) const;

 private:
  int n_;
  std::vector<double> m_;
  mutable std::vector<double> scratch_;
};

struct DctParams {
  int block = 8;           ///< 8 or 16
  double threshold = 0.0;  ///< on the [0,1] scale, >= 0

  void validate() const;
};

/// Overlapping block DCT hard thresholding. The image is reflect-padded by
/// block/2 on each side and tiled with blocks at stride block/2 (the last
/// block on each axis is aligned to the padded edge). In every block each
/// AC coefficient with |c| < threshold is zeroed; the DC term is kept. The
/// inverse-transformed blocks are averaged with uniform weights.
Image dct_threshold_denoise(const Image& img, const DctParams& params);

namespace reference {
Image dct_threshold_denoise_serial(const Image& img, const DctParams& params);
}

}  // namespace dnb
