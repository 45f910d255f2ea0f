#include <cmath>
#include <cstring>
#include <memory>

#include <gtest/gtest.h>

#include "dnbench/dihedral.hpp"
#include "dnbench/error.hpp"
#include "dnbench/metrics.hpp"
#include "dnbench/noise.hpp"
#include "dnbench/report.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace dnb;

namespace {

Image shifted(const Image& a, float d) {
  Image b = a;
  for (float& v : b.data()) v += d;
  return b;
}

}  // namespace

TEST(Psnr, IdenticalImagesHitCap) {
  const Image a = test::random_image(16, 16, 3, 1);
  EXPECT_EQ(psnr(a, a), kPsnrCapDb);
  EXPECT_EQ(psnr(a, a, 1.0, PsnrPooling::per_channel_mean), kPsnrCapDb);
}

TEST(Psnr, ConstantOffsetIsTwentyDb) {
  const Image a = test::random_image(32, 32, 3, 2);
  const double db = psnr(a, shifted(a, 0.1f));
  EXPECT_NEAR(db, 20.0, 5e-5);
  EXPECT_EQ(format_fixed(db, 4), "20.0000");
  EXPECT_NEAR(db, test::naive_psnr(a, shifted(a, 0.1f)), 1e-12);
}

TEST(Psnr, GaussianNoiseLevel) {
  const Image a(384, 384, 3, 0.5f);
  NoiseSpec spec;
  const Image b = add_gaussian_noise(a, spec, derive_stream(5, "psnr"));
  EXPECT_NEAR(psnr(a, b), 14.1497, 0.10);
}

TEST(Psnr, SymmetricExactly) {
  const Image a = test::random_image(20, 11, 3, 3);
  const Image b = test::random_image(20, 11, 3, 4);
  EXPECT_EQ(psnr(a, b), psnr(b, a));
}

TEST(Psnr, MonotoneInErrorScale) {
  const Image a = test::random_image(24, 24, 3, 5);
  const Image e = test::random_image(24, 24, 3, 6, -0.05f, 0.05f);
  double prev = 1e9;
  for (float t : {1.0f, 1.5f, 2.0f, 4.0f}) {
    Image b = a;
    for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] += t * e.data()[i];
    const double db = psnr(a, b);
    EXPECT_LT(db, prev);
    prev = db;
  }
}

TEST(Psnr, PerChannelPooling) {
  Image a(8, 8, 3, 0.0f);
  Image b = a;
  for (float& v : b.plane(0)) v = 0.1f;
  for (float& v : b.plane(1)) v = 0.01f;
  const double per = psnr(a, b, 1.0, PsnrPooling::per_channel_mean);
  const double expect = (-20 * std::log10(static_cast<double>(0.1f)) - 20 * std::log10(static_cast<double>(0.01f)) + 99.0) / 3;
  EXPECT_NEAR(per, expect, 1e-9);
  EXPECT_NE(per, psnr(a, b));
}

TEST(Psnr, ShapeMismatch) {
  EXPECT_THROW(psnr(Image(4, 4, 3), Image(4, 5, 3)), Error);
}

TEST(Ssim, WindowWeightsSumToOne) {
  const auto taps = SsimParams{}.taps();
  double s = 0.0;
  for (double a : taps) {
    for (double b : taps) s += a * b;
  }
  EXPECT_NEAR(s, 1.0, 1e-9);
}

TEST(Ssim, MatchesNaiveOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Image a = test::random_image(32, 32, 3, 100 + seed);
    Image b = a;
    const Image n = test::random_image(32, 32, 3, 200 + seed, -0.2f, 0.2f);
    for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] += n.data()[i] * (seed % 4);
    EXPECT_NEAR(ssim(a, b), test::naive_ssim(a, b), 1e-6) << seed;
    EXPECT_NEAR(reference::ssim_serial(a, b), test::naive_ssim(a, b), 1e-6) << seed;
  }
}

TEST(Ssim, SelfIsExactlyOne) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Image a = test::random_image(40, 23, 3, seed);
    EXPECT_EQ(ssim(a, a), 1.0);
  }
}

TEST(Ssim, ConstantZeroVersusOne) {
  const double v = ssim(Image(16, 16, 3, 0.0f), Image(16, 16, 3, 1.0f));
  EXPECT_NEAR(v, 1e-4 / 1.0001, 1e-12);
  EXPECT_NEAR(v, 9.999e-5, 1e-8);
}

TEST(Ssim, SymmetricAndBounded) {
  const Image a = test::random_image(30, 25, 3, 7);
  const Image b = test::random_image(30, 25, 3, 8);
  EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-9);
  EXPECT_GE(ssim(a, b), -1.0);
  EXPECT_LE(ssim(a, b), 1.0);
}

TEST(Metrics, InvariantUnderJointDihedral) {
  const Image a = test::random_image(27, 19, 3, 9);
  const Image b = test::random_image(27, 19, 3, 10);
  for (Dihedral t : kAllDihedral) {
    const Image ta = apply(t, a), tb = apply(t, b);
    EXPECT_NEAR(psnr(ta, tb), psnr(a, b), 1e-9) << to_string(t);
    EXPECT_NEAR(ssim(ta, tb), ssim(a, b), 1e-9) << to_string(t);
  }
}

TEST(Ssim, Errors) {
  EXPECT_THROW(ssim(Image(10, 20, 3), Image(10, 20, 3)), Error);
  EXPECT_THROW(ssim(Image(20, 20, 3), Image(20, 21, 3)), Error);
}

TEST(Measure, NoOpIsFast) {
  const auto m = measure([] {});
  EXPECT_GE(m.measurement.wall_ms, 0.0);
  EXPECT_LT(m.measurement.wall_ms, 10.0);
}

TEST(Measure, PureFunctionSameResult) {
  const Image a = test::random_image(64, 64, 3, 11);
  auto f = [&] { return ssim(a, shifted(a, 0.05f)); };
  const auto m1 = measure(f);
  const auto m2 = measure(f);
  EXPECT_EQ(m1.result, m2.result);
}

TEST(Measure, LargeAllocationRaisesPeak) {
  if (!sample_memory().available) GTEST_SKIP() << "no memory accounting on this platform";
  constexpr std::size_t kBytes = 100u << 20;
  // Returning the buffer keeps the optimizer from eliding the allocation.
  const auto m = measure([] { return std::vector<char>(kBytes, 1); });
  ASSERT_EQ(m.result[kBytes / 2], 1);
  ASSERT_TRUE(m.measurement.memory_available);
  MemoryProbe probe;
  if (!probe.hwm_reset()) GTEST_SKIP() << "high-water mark cannot be reset here";
  EXPECT_GE(m.measurement.mem_delta_mb, 95.0);
  EXPECT_GE(m.measurement.peak_mem_mb, 95.0);
}
