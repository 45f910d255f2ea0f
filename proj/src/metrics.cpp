#include "dnbench/metrics.hpp"

#include <sys/resource.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "dnbench/error.hpp"

namespace dnb {

namespace {

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!same_shape(a, b)) {
    throw Error(Errc::shape_mismatch, std::string(what) + ": image shapes differ");
  }
}

double psnr_from_mse(double mse, double max_val) {
  if (mse == 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(max_val * max_val / mse));
}

double plane_sse(std::span<const float> a, std::span<const float> b) {
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    sse += d * d;
  }
  return sse;
}

}  // namespace

double psnr(const Image& a, const Image& b, double max_val, PsnrPooling pooling) {
  require_same_shape(a, b, "psnr");
  if (pooling == PsnrPooling::per_channel_mean) {
    double sum = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
      sum += psnr_from_mse(plane_sse(a.plane(c), b.plane(c)) / a.plane_size(), max_val);
    }
    return sum / a.channels();
  }
  // Pair-symmetric: (a-b)^2 == (b-a)^2 bit for bit, and the order is fixed.
  return psnr_from_mse(plane_sse(a.data(), b.data()) / a.size(), max_val);
}

std::vector<double> SsimParams::taps() const {
  const int r = window / 2;
  std::vector<double> t(window);
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    const double d = i - r;
    t[i] = std::exp(-d * d / (2.0 * gaussian_std * gaussian_std));
    sum += t[i];
  }
  for (double& v : t) v /= sum;
  return t;
}

namespace {

void check_ssim_input(const Image& a, const Image& b, const SsimParams& p) {
  require_same_shape(a, b, "ssim");
  if (p.window < 1 || p.window % 2 == 0) {
    throw Error(Errc::invalid_argument, "SSIM window must be odd");
  }
  if (a.width() < p.window || a.height() < p.window) {
    throw Error(Errc::too_small, "SSIM needs images of at least " + std::to_string(p.window) +
                                     "x" + std::to_string(p.window));
  }
}

inline double ssim_term(double mu_a, double mu_b, double e_aa, double e_bb, double e_ab, double c1,
                        double c2) {
  const double var_a = e_aa - mu_a * mu_a;
  const double var_b = e_bb - mu_b * mu_b;
  const double cov = e_ab - mu_a * mu_b;
  return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
         ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

}  // namespace

double ssim(const Image& a, const Image& b, const SsimParams& p) {
  check_ssim_input(a, b, p);
  const auto taps = p.taps();
  const int k = p.window;
  const int W = a.width();
  const int H = a.height();
  const int vw = W - k + 1;
  const int vh = H - k + 1;
  const double c1 = p.c1();
  const double c2 = p.c2();

  double channel_sum = 0.0;
  std::vector<double> ha(static_cast<std::size_t>(H) * vw), hb(ha.size()), haa(ha.size()),
      hbb(ha.size()), hab(ha.size());
  std::vector<double> row_sum(vh);

  for (int c = 0; c < a.channels(); ++c) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < H; ++y) {
      const float* ra = a.row(c, y);
      const float* rb = b.row(c, y);
      for (int x = 0; x < vw; ++x) {
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (int t = 0; t < k; ++t) {
          const double va = ra[x + t];
          const double vb = rb[x + t];
          const double w = taps[t];
          sa += w * va;
          sb += w * vb;
          saa += w * va * va;
          sbb += w * vb * vb;
          sab += w * va * vb;
        }
        const std::size_t i = static_cast<std::size_t>(y) * vw + x;
        ha[i] = sa;
        hb[i] = sb;
        haa[i] = saa;
        hbb[i] = sbb;
        hab[i] = sab;
      }
    }

#pragma omp parallel for schedule(static)
    for (int y = 0; y < vh; ++y) {
      double acc = 0.0;
      for (int x = 0; x < vw; ++x) {
        double ma = 0, mb = 0, eaa = 0, ebb = 0, eab = 0;
        for (int t = 0; t < k; ++t) {
          const std::size_t i = static_cast<std::size_t>(y + t) * vw + x;
          const double w = taps[t];
          ma += w * ha[i];
          mb += w * hb[i];
          eaa += w * haa[i];
          ebb += w * hbb[i];
          eab += w * hab[i];
        }
        acc += ssim_term(ma, mb, eaa, ebb, eab, c1, c2);
      }
      row_sum[y] = acc;
    }
    double total = 0.0;
    for (double s : row_sum) total += s;
    channel_sum += total / (static_cast<double>(vw) * vh);
  }
  return channel_sum / a.channels();
}

namespace reference {

double ssim_serial(const Image& a, const Image& b, const SsimParams& p) {
  check_ssim_input(a, b, p);
  const auto taps = p.taps();
  const int k = p.window;
  const int vw = a.width() - k + 1;
  const int vh = a.height() - k + 1;
  double channel_sum = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    double total = 0.0;
    for (int y0 = 0; y0 < vh; ++y0) {
      for (int x0 = 0; x0 < vw; ++x0) {
        double ma = 0, mb = 0, eaa = 0, ebb = 0, eab = 0;
        for (int dy = 0; dy < k; ++dy) {
          for (int dx = 0; dx < k; ++dx) {
            const double w = taps[dy] * taps[dx];
            const double va = a.at(c, y0 + dy, x0 + dx);
            const double vb = b.at(c, y0 + dy, x0 + dx);
            ma += w * va;
            mb += w * vb;
            eaa += w * va * va;
            ebb += w * vb * vb;
            eab += w * va * vb;
          }
        }
        total += ssim_term(ma, mb, eaa, ebb, eab, p.c1(), p.c2());
      }
    }
    channel_sum += total / (static_cast<double>(vw) * vh);
  }
  return channel_sum / a.channels();
}

}  // namespace reference

MemorySample sample_memory() {
  MemorySample s;
  std::ifstream status("/proc/self/status");
  std::string line;
  bool have_rss = false;
  bool have_hwm = false;
  while (std::getline(status, line)) {
    long kb = 0;
    if (std::sscanf(line.c_str(), "VmRSS: %ld kB", &kb) == 1) {
      s.rss_mb = kb / 1024.0;
      have_rss = true;
    } else if (std::sscanf(line.c_str(), "VmHWM: %ld kB", &kb) == 1) {
      s.hwm_mb = kb / 1024.0;
      have_hwm = true;
    }
  }
  if (!have_hwm) {
    rusage ru{};
    if (::getrusage(RUSAGE_SELF, &ru) == 0) {
      s.hwm_mb = ru.ru_maxrss / 1024.0;  // Linux reports KiB
      have_hwm = true;
    }
  }
  if (!have_rss) s.rss_mb = s.hwm_mb;
  s.available = have_hwm;
  return s;
}

MemoryProbe::MemoryProbe() {
  {
    std::ofstream clear("/proc/self/clear_refs");
    if (clear) {
      clear << "5";
      clear.flush();
      hwm_reset_ = static_cast<bool>(clear);
    }
  }
  start_ = sample_memory();
}

MemorySample MemoryProbe::finish() const {
  MemorySample s = sample_memory();
  s.hwm_mb = std::max(s.hwm_mb, s.rss_mb);
  return s;
}

}  // namespace dnb
