#pragma once

#include <vector>

#include "dnbench/image.hpp"

namespace dnb {

/// Mirror index without repeating the edge sample (-1 -> 1, n -> n-2),
/// folded periodically so any offset is valid even when it exceeds n.
constexpr int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - m;
}

/// Normalized 1-D Gaussian taps for offsets -radius..radius.
std::vector<double> gaussian_taps(double stddev, int radius);

/// Separable Gaussian blur, radius ceil(3*stddev), reflect borders. Rows are
/// filtered before columns. stddev == 0 returns the input unchanged.
Image gaussian_blur(const Image& img, double stddev);

/// Horizontal-only box mean over 2*radius+1 taps with reflect borders. Not
/// equivariant under the dihedral group, which makes it useful for
/// exercising the self-ensemble.
Image hbox_blur(const Image& img, int radius);

}  // namespace dnb
