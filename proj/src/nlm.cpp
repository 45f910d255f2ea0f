#include "dnbench/nlm.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dnbench/error.hpp"
#include "dnbench/filters.hpp"

namespace dnb {

void NlmParams::validate() const {
  if (patch < 1 || patch % 2 == 0) throw Error(Errc::invalid_argument, "NLM patch must be odd >= 1");
  if (search < 1 || search % 2 == 0) {
    throw Error(Errc::invalid_argument, "NLM search window must be odd >= 1");
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(Errc::invalid_argument, "NLM h must be > 0");
  if (!(sigma_n >= 0.0)) throw Error(Errc::invalid_argument, "NLM sigma_n must be >= 0");
}

namespace {

struct Padded {
  int w = 0, h = 0, pad = 0, channels = 0;
  std::vector<float> data;

  const float* row(int c, int y) const { return data.data() + (static_cast<std::size_t>(c) * h + y) * w; }
};

Padded reflect_pad(const Image& img, int pad) {
  Padded p;
  p.pad = pad;
  p.w = img.width() + 2 * pad;
  p.h = img.height() + 2 * pad;
  p.channels = img.channels();
  p.data.resize(static_cast<std::size_t>(p.w) * p.h * p.channels);
  for (int c = 0; c < p.channels; ++c) {
    for (int y = 0; y < p.h; ++y) {
      const float* src = img.row(c, reflect_index(y - pad, img.height()));
      float* dst = p.data.data() + (static_cast<std::size_t>(c) * p.h + y) * p.w;
      for (int x = 0; x < p.w; ++x) dst[x] = src[reflect_index(x - pad, img.width())];
    }
  }
  return p;
}

constexpr int kChunkRows = 16;

}  // namespace

Image nlm_denoise(const Image& img, const NlmParams& params) {
  params.validate();
  const int pr = params.patch / 2;
  const int sr = params.search / 2;
  const int pad = pr + sr;
  const Padded P = reflect_pad(img, pad);
  const int W = img.width();
  const int H = img.height();
  const int C = img.channels();
  const double inv_norm = 1.0 / (static_cast<double>(C) * params.patch * params.patch);
  const double bias = 2.0 * params.sigma_n * params.sigma_n;
  const double inv_h2 = 1.0 / (params.h * params.h);
  const int span = W + 2 * pr;  // columns touched by the patches of one row

  Image out(W, H, C);
  const int chunks = (H + kChunkRows - 1) / kChunkRows;

#pragma omp parallel for schedule(dynamic, 1)
  for (int chunk = 0; chunk < chunks; ++chunk) {
    const int y_begin = chunk * kChunkRows;
    const int y_end = std::min(H, y_begin + kChunkRows);
    const int rows = y_end - y_begin;
    std::vector<double> acc_w(static_cast<std::size_t>(rows) * W, 0.0);
    std::vector<double> acc_v(static_cast<std::size_t>(rows) * W * C, 0.0);
    std::vector<double> colsum(span);

    // Squared difference summed over channels at padded row v, columns
    // starting at pad - pr, against the same row shifted by (dx, dy).
    auto row_diff = [&](int v, int dx, int dy, double sign) {
      for (int c = 0; c < C; ++c) {
        const float* a = P.row(c, v) + (pad - pr);
        const float* b = P.row(c, v + dy) + (pad - pr + dx);
        for (int j = 0; j < span; ++j) {
          const double d = static_cast<double>(a[j]) - b[j];
          colsum[j] += sign * d * d;
        }
      }
    };

    for (int dy = -sr; dy <= sr; ++dy) {
      for (int dx = -sr; dx <= sr; ++dx) {
        std::fill(colsum.begin(), colsum.end(), 0.0);
        for (int k = -pr; k <= pr; ++k) row_diff(y_begin + pad + k, dx, dy, 1.0);

        for (int y = y_begin; y < y_end; ++y) {
          if (y > y_begin) {
            row_diff(y - 1 + pad - pr, dx, dy, -1.0);
            row_diff(y + pad + pr, dx, dy, 1.0);
          }
          double window = 0.0;
          for (int j = 0; j < params.patch; ++j) window += colsum[j];
          const std::size_t base = static_cast<std::size_t>(y - y_begin) * W;
          for (int x = 0; x < W; ++x) {
            if (x > 0) window += colsum[x + 2 * pr] - colsum[x - 1];
            const double d2 = std::max(window, 0.0) * inv_norm;
            const double wgt = std::exp(-std::max(d2 - bias, 0.0) * inv_h2);
            acc_w[base + x] += wgt;
            for (int c = 0; c < C; ++c) {
              acc_v[(static_cast<std::size_t>(c) * rows) * W + base + x] +=
                  wgt * P.row(c, y + pad + dy)[x + pad + dx];
            }
          }
        }
      }
    }

    for (int c = 0; c < C; ++c) {
      for (int y = y_begin; y < y_end; ++y) {
        float* dst = out.row(c, y);
        const std::size_t base = static_cast<std::size_t>(y - y_begin) * W;
        for (int x = 0; x < W; ++x) {
          dst[x] = static_cast<float>(acc_v[(static_cast<std::size_t>(c) * rows) * W + base + x] /
                                      acc_w[base + x]);
        }
      }
    }
  }
  return out;
}

namespace reference {

Image nlm_denoise_serial(const Image& img, const NlmParams& params) {
  params.validate();
  const int pr = params.patch / 2;
  const int sr = params.search / 2;
  const int pad = pr + sr;
  const Padded P = reflect_pad(img, pad);
  const int C = img.channels();
  const double inv_norm = 1.0 / (static_cast<double>(C) * params.patch * params.patch);
  const double bias = 2.0 * params.sigma_n * params.sigma_n;
  const double inv_h2 = 1.0 / (params.h * params.h);

  Image out(img.width(), img.height(), C);
  std::vector<double> value(C);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const int py = y + pad;
      const int px = x + pad;
      double wsum = 0.0;
      std::fill(value.begin(), value.end(), 0.0);
      for (int dy = -sr; dy <= sr; ++dy) {
        for (int dx = -sr; dx <= sr; ++dx) {
          double dist = 0.0;
          for (int c = 0; c < C; ++c) {
            for (int ky = -pr; ky <= pr; ++ky) {
              const float* a = P.row(c, py + ky);
              const float* b = P.row(c, py + dy + ky);
              for (int kx = -pr; kx <= pr; ++kx) {
                const double d = static_cast<double>(a[px + kx]) - b[px + dx + kx];
                dist += d * d;
              }
            }
          }
          const double wgt = std::exp(-std::max(dist * inv_norm - bias, 0.0) * inv_h2);
          wsum += wgt;
          for (int c = 0; c < C; ++c) value[c] += wgt * P.row(c, py + dy)[px + dx];
        }
      }
      for (int c = 0; c < C; ++c) out.at(c, y, x) = static_cast<float>(value[c] / wsum);
    }
  }
  return out;
}

}  // namespace reference

}  // namespace dnb
