#pragma once

#include <chrono>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "dnbench/image.hpp"

namespace dnb {

/// Returned for zero-MSE pairs so reports stay finite.
inline constexpr double kPsnrCapDb = 99.0;

enum class PsnrPooling {
  joint,             ///< one MSE over every sample of every channel
  per_channel_mean,  ///< mean of per-channel PSNRs
};

double psnr(const Image& a, const Image& b, double max_val = 1.0,
            PsnrPooling pooling = PsnrPooling::joint);

struct SsimParams {
  int window = 11;
  double gaussian_std = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;

  double c1() const noexcept { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const noexcept { return (k2 * dynamic_range) * (k2 * dynamic_range); }
  /// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
  std::vector<double> taps() const;
};

/// Mean SSIM: per channel over all valid (unpadded) window positions, then
/// averaged over channels. Images must share a shape with both sides at
/// least `window` pixels.
double ssim(const Image& a, const Image& b, const SsimParams& params = {});

namespace reference {
/// Direct 2-D window evaluation, single-threaded.
double ssim_serial(const Image& a, const Image& b, const SsimParams& params = {});
}

/// Process resident-set sampling around a measured call.
struct MemorySample {
  bool available = false;
  double rss_mb = 0.0;
  double hwm_mb = 0.0;
};

class MemoryProbe {
 public:
  /// Resets the kernel high-water mark where permitted (Linux clear_refs),
  /// then samples the current RSS.
  MemoryProbe();
  /// Peak RSS observed since construction (process-wide, approximate).
  MemorySample finish() const;
  bool hwm_reset() const noexcept { return hwm_reset_; }
  double start_rss_mb() const noexcept { return start_.rss_mb; }

 private:
  MemorySample start_;
  bool hwm_reset_ = false;
};

MemorySample sample_memory();

struct Measurement {
  double wall_ms = 0.0;
  double peak_mem_mb = 0.0;   ///< process peak RSS during the call
  double mem_delta_mb = 0.0;  ///< peak minus RSS at entry
  bool memory_available = false;
};

template <class T>
struct Measured {
  T result;
  Measurement measurement;
};

/// Times `f` on a monotonic clock and records process peak memory.
template <class F>
auto measure(F&& f) {
  using R = std::invoke_result_t<F>;
  MemoryProbe probe;
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&]() {
    Measurement m;
    m.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
    const MemorySample s = probe.finish();
    m.memory_available = s.available;
    m.peak_mem_mb = s.hwm_mb;
    m.mem_delta_mb = s.hwm_mb - probe.start_rss_mb();
    return m;
  };
  if constexpr (std::is_void_v<R>) {
    std::forward<F>(f)();
    return Measured<std::monostate>{{}, finish()};
  } else {
    R r = std::forward<F>(f)();
    Measurement m = finish();
    return Measured<R>{std::move(r), m};
  }
}

}  // namespace dnb
