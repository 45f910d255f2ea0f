#include <cmath>

#include <gtest/gtest.h>

#include "dnbench/backend.hpp"
#include "dnbench/dct_denoise.hpp"
#include "dnbench/error.hpp"
#include "dnbench/filters.hpp"
#include "dnbench/metrics.hpp"
#include "dnbench/nlm.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace dnb;

namespace {

double max_abs_diff(const Image& a, const Image& b) {
  EXPECT_TRUE(same_shape(a, b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
  }
  return m;
}

}  // namespace

TEST(ReflectIndex, MatchesOracle) {
  for (int n : {1, 2, 3, 7}) {
    for (int i = -20; i < 30; ++i) EXPECT_EQ(reflect_index(i, n), test::reflect101(i, n)) << i << "/" << n;
  }
  static_assert(reflect_index(-1, 5) == 1 && reflect_index(5, 5) == 3);
}

TEST(GaussianBlur, ZeroStdIsIdentity) {
  const Image x = test::random_image(13, 9, 3, 1);
  EXPECT_TRUE(bit_equal(gaussian_blur(x, 0.0), x));
}

TEST(GaussianBlur, PreservesConstant) {
  const Image y = gaussian_blur(Image(20, 17, 3, 0.625f), 1.5);
  for (float v : y.data()) EXPECT_NEAR(v, 0.625f, 1e-6f);
}

TEST(GaussianBlur, TapsNormalized) {
  const auto taps = gaussian_taps(1.5, 5);
  ASSERT_EQ(taps.size(), 11u);
  double s = 0.0;
  for (double t : taps) s += t;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(taps[0], taps[10]);
}

TEST(Nlm, ConstantImage) {
  NlmParams p;
  p.patch = 3;
  p.search = 7;
  p.h = 0.1;
  for (const Image out = nlm_denoise(Image(12, 10, 3, 0.3f), p); float v : out.data()) EXPECT_NEAR(v, 0.3f, 1e-6f);
}

TEST(Nlm, LargeHApproachesBoxMean) {
  const Image x = test::random_image(9, 8, 3, 2);
  NlmParams p;
  p.patch = 3;
  p.search = 5;
  p.h = 1e4;
  const Image y = nlm_denoise(x, p);
  for (int c = 0; c < 3; ++c) {
    for (int yy = 0; yy < 8; ++yy) {
      for (int xx = 0; xx < 9; ++xx) {
        double s = 0.0;
        for (int dy = -2; dy <= 2; ++dy) {
          for (int dx = -2; dx <= 2; ++dx) s += x.at(c, test::reflect101(yy + dy, 8), test::reflect101(xx + dx, 9));
        }
        EXPECT_NEAR(y.at(c, yy, xx), s / 25.0, 1e-4);
      }
    }
  }
}

TEST(Nlm, MatchesQuadrupleLoopOracle) {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const Image x = test::random_image(8, 8, 3, seed);
    NlmParams p;
    p.patch = 3;
    p.search = 5;
    p.h = 0.15;
    p.sigma_n = 0.05;
    EXPECT_LE(max_abs_diff(nlm_denoise(x, p), test::naive_nlm(x, 3, 5, 0.15, 0.05)), 1e-5);
    EXPECT_LE(max_abs_diff(reference::nlm_denoise_serial(x, p), test::naive_nlm(x, 3, 5, 0.15, 0.05)),
              1e-5);
  }
}

TEST(Nlm, OracleOnOddShapesAndLargerWindows) {
  const Image x = test::random_image(16, 11, 3, 6);
  NlmParams p;
  p.patch = 5;
  p.search = 9;
  p.h = 0.2;
  EXPECT_LE(max_abs_diff(nlm_denoise(x, p), test::naive_nlm(x, 5, 9, 0.2, 0.0)), 1e-5);
}

TEST(Nlm, FastMatchesSerialOnTallImage) {
  // Spans several row chunks of the fast kernel.
  const Image x = test::random_image(23, 70, 3, 7);
  NlmParams p;
  p.patch = 5;
  p.search = 7;
  p.h = 0.1;
  p.sigma_n = 0.02;
  EXPECT_LE(max_abs_diff(nlm_denoise(x, p), reference::nlm_denoise_serial(x, p)), 1e-5);
}

TEST(Nlm, ImprovesNoisyPiecewiseSmooth) {
  const Image clean = test::piecewise_smooth(64, 64, 8);
  NoiseSpec noise;
  noise.seed = 8;
  const Image noisy = add_gaussian_noise(clean, noise, derive_stream(noise.seed, "nlm"));
  const auto b = make_denoiser(parse_backend_spec("nlm"), noise);
  const Image out = denoise(*b, noisy);
  EXPECT_GT(psnr(out, clean), psnr(noisy, clean) + 3.0);
}

TEST(Nlm, RejectsBadParameters) {
  NlmParams p;
  p.patch = 4;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.search = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.h = 0.0;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Dct, BasisIsOrthonormal) {
  for (int n : {8, 16}) {
    DctBasis b(n);
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += b.at(k, i) * b.at(l, i);
        EXPECT_NEAR(s, k == l ? 1.0 : 0.0, 1e-12);
      }
    }
  }
}

TEST(Dct, ZeroThresholdReconstructs) {
  const Image x = test::random_image(21, 13, 3, 9);
  EXPECT_LE(max_abs_diff(dct_threshold_denoise(x, {8, 0.0}), x), 1e-5);
  EXPECT_LE(max_abs_diff(dct_threshold_denoise(x, {16, 0.0}), x), 1e-5);
}

TEST(Dct, ConstantPreserved) {
  for (double thr : {0.0, 0.1, 10.0}) {
    for (const Image out = dct_threshold_denoise(Image(19, 12, 3, 0.42f), {8, thr}); float v : out.data()) {
      EXPECT_NEAR(v, 0.42f, 1e-6f);
    }
  }
}

TEST(Dct, SingleBlockMatchesMatrixOracle) {
  const Image x = test::random_image(8, 8, 3, 10);
  EXPECT_LE(max_abs_diff(dct_threshold_denoise(x, {8, 0.2}), test::naive_dct_denoise(x, 8, 0.2)),
            1e-6);
}

TEST(Dct, OracleOnLargerInputs) {
  const Image x = test::random_image(16, 16, 3, 11);
  EXPECT_LE(max_abs_diff(dct_threshold_denoise(x, {8, 0.15}), test::naive_dct_denoise(x, 8, 0.15)),
            1e-5);
  const Image y = test::random_image(13, 11, 3, 12);
  EXPECT_LE(max_abs_diff(dct_threshold_denoise(y, {16, 0.1}), test::naive_dct_denoise(y, 16, 0.1)),
            1e-5);
}

TEST(Dct, ParallelMatchesSerial) {
  const Image x = test::random_image(75, 41, 3, 13);
  EXPECT_TRUE(bit_equal(dct_threshold_denoise(x, {8, 0.2}),
                        reference::dct_threshold_denoise_serial(x, {8, 0.2})));
}

TEST(Dct, RejectsBadBlock) {
  EXPECT_THROW(dct_threshold_denoise(Image(8, 8, 3), {4, 0.0}), Error);
  EXPECT_THROW(dct_threshold_denoise(Image(8, 8, 3), {8, -1.0}), Error);
}

TEST(BackendSpec, ParseAndCanonical) {
  const BackendSpec s = parse_backend_spec("nlm:search=9,patch=5");
  EXPECT_EQ(s.kind, BackendKind::nlm);
  EXPECT_EQ(s.params.at("patch"), "5");
  EXPECT_EQ(s.canonical(), "nlm:patch=5,search=9");
  EXPECT_EQ(parse_backend_spec("identity").canonical(), "identity");
  EXPECT_THROW(parse_backend_spec("bm3d"), Error);
  EXPECT_THROW(parse_backend_spec("nlm:patch"), Error);
}

TEST(Backend, UnknownOrMalformedParamsRejected) {
  EXPECT_THROW(make_denoiser(parse_backend_spec("gaussian_blur:sigma=2")), Error);
  EXPECT_THROW(make_denoiser(parse_backend_spec("nlm:patch=abc")), Error);
  EXPECT_THROW(make_denoiser(parse_backend_spec("nlm:patch=2.5")), Error);
  EXPECT_THROW(make_denoiser(parse_backend_spec("dct_threshold:block=12")), Error);
  EXPECT_THROW(make_denoiser(parse_backend_spec("external")), Error);
}

TEST(Backend, IdentityAndDegenerateGaussian) {
  const Image x = test::random_image(10, 8, 3, 14);
  EXPECT_TRUE(bit_equal(denoise(*make_denoiser(parse_backend_spec("identity")), x), x));
  EXPECT_TRUE(bit_equal(denoise(*make_denoiser(parse_backend_spec("gaussian_blur:std=0")), x), x));
  const Image c(16, 16, 3, 0.2f);
  for (const Image out = denoise(*make_denoiser(parse_backend_spec("gaussian_blur:std=1.5")), c); float v : out.data()) {
    EXPECT_NEAR(v, 0.2f, 1e-6f);
  }
}

TEST(Backend, NoiseAwareDefaults) {
  NoiseSpec noise;
  const Image x = test::random_image(12, 12, 3, 15);
  NlmParams np;
  np.sigma_n = noise.sigma();
  np.h = 0.4 * noise.sigma();
  EXPECT_TRUE(bit_equal(denoise(*make_denoiser(parse_backend_spec("nlm"), noise), x), nlm_denoise(x, np)));
  EXPECT_TRUE(bit_equal(denoise(*make_denoiser(parse_backend_spec("dct_threshold"), noise), x),
                        dct_threshold_denoise(x, {8, 3.0 * noise.sigma()})));
  NoiseSpec quiet;
  quiet.sigma_8bit = 0.0;
  EXPECT_NO_THROW(make_denoiser(parse_backend_spec("nlm"), quiet));
}

TEST(Backend, RequiresThreeChannels) {
  EXPECT_THROW(denoise(*make_denoiser(parse_backend_spec("identity")), Image(4, 4, 1)), Error);
}

TEST(Backend, DeterministicAndShapePreserving) {
  const Image x = test::random_image(24, 16, 3, 16);
  for (const char* spec : {"identity", "gaussian_blur:std=1", "hbox_blur:radius=3", "nlm:patch=3,search=7",
                           "dct_threshold:block=8,threshold=0.1"}) {
    const auto b = make_denoiser(parse_backend_spec(spec), NoiseSpec{});
    EXPECT_TRUE(b->deterministic());
    const Image y1 = denoise(*b, x);
    EXPECT_TRUE(same_shape(y1, x)) << spec;
    EXPECT_TRUE(bit_equal(y1, denoise(*b, x))) << spec;
  }
}
