// Serial reference kernels against their OpenMP counterparts.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>

#include "dnbench/dct_denoise.hpp"
#include "dnbench/metrics.hpp"
#include "dnbench/nlm.hpp"
#include "dnbench/noise.hpp"

namespace {

dnb::Image random_image(int side, std::uint64_t seed) {
  dnb::Image img(side, side, 3);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  for (float& v : img.data()) v = dist(rng);
  return img;
}

dnb::NlmParams nlm_params() {
  dnb::NlmParams p;
  p.patch = 5;
  p.search = 11;
  p.sigma_n = 0.1;
  p.h = 0.04;
  return p;
}

void BM_NlmSerial(benchmark::State& st) {
  const auto x = random_image(static_cast<int>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(dnb::reference::nlm_denoise_serial(x, nlm_params()));
}

void BM_NlmParallel(benchmark::State& st) {
  const auto x = random_image(static_cast<int>(st.range(0)), 1);
  for (auto _ : st) benchmark::DoNotOptimize(dnb::nlm_denoise(x, nlm_params()));
}

void BM_DctSerial(benchmark::State& st) {
  const auto x = random_image(static_cast<int>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(dnb::reference::dct_threshold_denoise_serial(x, {8, 0.2}));
}

void BM_DctParallel(benchmark::State& st) {
  const auto x = random_image(static_cast<int>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(dnb::dct_threshold_denoise(x, {8, 0.2}));
}

void BM_SsimSerial(benchmark::State& st) {
  const auto a = random_image(static_cast<int>(st.range(0)), 3);
  const auto b = random_image(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(dnb::reference::ssim_serial(a, b));
}

void BM_SsimParallel(benchmark::State& st) {
  const auto a = random_image(static_cast<int>(st.range(0)), 3);
  const auto b = random_image(static_cast<int>(st.range(0)), 4);
  for (auto _ : st) benchmark::DoNotOptimize(dnb::ssim(a, b));
}

dnb::NoiseSpec noise_spec() {
  dnb::NoiseSpec s;
  s.sigma_8bit = 50.0;
  return s;
}

void BM_NoiseSerial(benchmark::State& st) {
  const auto x = random_image(static_cast<int>(st.range(0)), 5);
  const auto stream = dnb::derive_stream(0, "bench");
  for (auto _ : st) benchmark::DoNotOptimize(dnb::reference::add_gaussian_noise_serial(x, noise_spec(), stream));
}

void BM_NoiseParallel(benchmark::State& st) {
  const auto x = random_image(static_cast<int>(st.range(0)), 5);
  const auto stream = dnb::derive_stream(0, "bench");
  for (auto _ : st) benchmark::DoNotOptimize(dnb::add_gaussian_noise(x, noise_spec(), stream));
}

}  // namespace

BENCHMARK(BM_NlmSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NlmParallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DctSerial)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DctParallel)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SsimSerial)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SsimParallel)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoiseSerial)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoiseParallel)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
