#pragma once

#include "dnbench/image.hpp"

namespace dnb {

struct NlmParams {
  int patch = 7;         ///< patch side, odd
  int search = 21;       ///< search window side, odd
  double h = 0.08;       ///< filtering strength on the [0,1] scale, > 0
  double sigma_n = 0.0;  ///< noise std on the [0,1] scale, >= 0

  void validate() const;
};

/// Pixelwise non-local means. For pixel p and candidate q in the search
/// window, d2 is the squared patch difference averaged over all patch
/// samples of all channels; the weight is exp(-max(d2 - 2 sigma_n^2, 0) / h^2)
/// and every channel of p becomes the weighted mean of q. Borders use
/// reflect padding (see reflect_index).
///
/// Computed per search offset with sliding patch sums over fixed 16-row
/// chunks, so the result does not depend on the thread count.
Image nlm_denoise(const Image& img, const NlmParams& params);

namespace reference {
/// Direct per-pixel evaluation, single-threaded.
Image nlm_denoise_serial(const Image& img, const NlmParams& params);
}

}  // namespace dnb
