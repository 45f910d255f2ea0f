#include "dnbench/dct_denoise.hpp"

#include <cmath>
#include <numbers>

#include "dnbench/error.hpp"
#include "dnbench/filters.hpp"

namespace dnb {

DctBasis::DctBasis(int n) : n_(n), m_(static_cast<std::size_t>(n) * n), scratch_(m_.size()) {
  if (n < 1) throw Error(Errc::invalid_argument, "DCT size must be >= 1");
  for (int k = 0; k < n; ++k) {
    const double alpha = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int i = 0; i < n; ++i) {
      m_[static_cast<std::size_t>(k) * n + i] =
          alpha * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
    }
  }
}

void DctBasis::forward(std::span<double> b) const {
  const int n = n_;
  // rows: T = B M^T, then columns: C = M T
  for (int y = 0; y < n; ++y) {
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += b[y * n + i] * at(k, i);
      scratch_[y * n + k] = s;
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int x = 0; x < n; ++x) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += at(k, i) * scratch_[i * n + x];
      b[k * n + x] = s;
    }
  }
}

void DctBasis::inverse(std::span<double> c) const {
  const int n = n_;
  // rows: T = C M, then columns: B = M^T T
  for (int y = 0; y < n; ++y) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += c[y * n + k] * at(k, i);
      scratch_[y * n + i] = s;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int x = 0; x < n; ++x) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += at(k, i) * scratch_[k * n + x];
      c[i * n + x] = s;
    }
  }
}

void DctParams::validate() const {
  if (block != 8 && block != 16) throw Error(Errc::invalid_argument, "DCT block must be 8 or 16");
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw Error(Errc::invalid_argument, "DCT threshold must be finite and >= 0");
  }
}

namespace {

struct BlockGrid {
  int pad;
  std::vector<int> xs;  // block origins in padded coordinates
  std::vector<int> ys;
  int padded_w;
  int padded_h;
};

std::vector<int> origins(int length, int block, int stride) {
  std::vector<int> out;
  for (int p = 0; p + block < length; p += stride) out.push_back(p);
  out.push_back(length - block);
  return out;
}

BlockGrid make_grid(const Image& img, int block) {
  BlockGrid g;
  g.pad = block / 2;
  g.padded_w = img.width() + 2 * g.pad;
  g.padded_h = img.height() + 2 * g.pad;
  g.xs = origins(g.padded_w, block, block / 2);
  g.ys = origins(g.padded_h, block, block / 2);
  return g;
}

// Loads one padded block of channel c, thresholds it in the DCT domain and
// writes the reconstruction back into `block`.
void process_block(const Image& img, int c, int bx, int by, const BlockGrid& g,
                   const DctBasis& basis, double threshold, std::vector<double>& block) {
  const int n = basis.size();
  for (int y = 0; y < n; ++y) {
    const float* src = img.row(c, reflect_index(by + y - g.pad, img.height()));
    for (int x = 0; x < n; ++x) block[y * n + x] = src[reflect_index(bx + x - g.pad, img.width())];
  }
  basis.forward(block);
  for (std::size_t k = 1; k < block.size(); ++k) {
    if (std::abs(block[k]) < threshold) block[k] = 0.0;
  }
  basis.inverse(block);
}

// Number of blocks covering each unpadded coordinate along one axis.
std::vector<int> coverage(const std::vector<int>& starts, int pad, int block, int extent) {
  std::vector<int> count(extent, 0);
  for (int s : starts) {
    for (int i = 0; i < block; ++i) {
      const int u = s + i - pad;
      if (u >= 0 && u < extent) ++count[u];
    }
  }
  return count;
}

}  // namespace

Image dct_threshold_denoise(const Image& img, const DctParams& params) {
  params.validate();
  const int n = params.block;
  const BlockGrid g = make_grid(img, n);
  const int W = img.width();
  const int H = img.height();
  const int C = img.channels();
  const int strips = static_cast<int>(g.ys.size());

  // One accumulation strip (n rows x W) per (channel, block row); strips are
  // merged afterwards in fixed order so the sum order is thread-independent.
  std::vector<std::vector<double>> strip(static_cast<std::size_t>(C) * strips);

#pragma omp parallel
  {
    const DctBasis basis(n);
    std::vector<double> block(static_cast<std::size_t>(n) * n);
#pragma omp for schedule(dynamic, 1)
    for (int job = 0; job < C * strips; ++job) {
      const int c = job / strips;
      const int by = g.ys[job % strips];
      auto& acc = strip[job];
      acc.assign(static_cast<std::size_t>(n) * W, 0.0);
      for (int bx : g.xs) {
        process_block(img, c, bx, by, g, basis, params.threshold, block);
        for (int y = 0; y < n; ++y) {
          for (int x = 0; x < n; ++x) {
            const int u = bx + x - g.pad;
            if (u >= 0 && u < W) acc[static_cast<std::size_t>(y) * W + u] += block[y * n + x];
          }
        }
      }
    }
  }

  std::vector<double> sum(static_cast<std::size_t>(W) * H * C, 0.0);
  for (int c = 0; c < C; ++c) {
    for (int s = 0; s < strips; ++s) {
      const auto& acc = strip[static_cast<std::size_t>(c) * strips + s];
      for (int y = 0; y < n; ++y) {
        const int v = g.ys[s] + y - g.pad;
        if (v < 0 || v >= H) continue;
        double* dst = sum.data() + (static_cast<std::size_t>(c) * H + v) * W;
        for (int x = 0; x < W; ++x) dst[x] += acc[static_cast<std::size_t>(y) * W + x];
      }
    }
  }

  const auto cx = coverage(g.xs, g.pad, n, W);
  const auto cy = coverage(g.ys, g.pad, n, H);
  Image out(W, H, C);
  for (int c = 0; c < C; ++c) {
    for (int y = 0; y < H; ++y) {
      float* dst = out.row(c, y);
      const double* src = sum.data() + (static_cast<std::size_t>(c) * H + y) * W;
      for (int x = 0; x < W; ++x) dst[x] = static_cast<float>(src[x] / (cx[x] * cy[y]));
    }
  }
  return out;
}

namespace reference {

Image dct_threshold_denoise_serial(const Image& img, const DctParams& params) {
  params.validate();
  const int n = params.block;
  const BlockGrid g = make_grid(img, n);
  const int W = img.width();
  const int H = img.height();
  const DctBasis basis(n);
  std::vector<double> block(static_cast<std::size_t>(n) * n);
  std::vector<double> sum(img.size(), 0.0);
  std::vector<int> count(img.size(), 0);

  for (int c = 0; c < img.channels(); ++c) {
    for (int by : g.ys) {
      for (int bx : g.xs) {
        process_block(img, c, bx, by, g, basis, params.threshold, block);
        for (int y = 0; y < n; ++y) {
          for (int x = 0; x < n; ++x) {
            const int u = bx + x - g.pad;
            const int v = by + y - g.pad;
            if (u < 0 || u >= W || v < 0 || v >= H) continue;
            const std::size_t i = img.index(c, v, u);
            sum[i] += block[y * n + x];
            ++count[i];
          }
        }
      }
    }
  }
  Image out(W, H, img.channels());
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<float>(sum[i] / count[i]);
  return out;
}

}  // namespace reference

}  // namespace dnb
