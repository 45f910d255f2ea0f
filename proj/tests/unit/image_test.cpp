#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include <gtest/gtest.h>

#include "dnbench/error.hpp"
#include "dnbench/image.hpp"
#include "dnbench/image_io.hpp"
#include "synth.hpp"

using namespace dnb;
using dnb::test::TempDir;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected dnb::Error";
  return Errc::config;
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Image, ConstructorValidatesShape) {
  Image img(4, 3, 3);
  EXPECT_EQ(img.size(), 36u);
  EXPECT_EQ(img.plane_size(), 12u);
  EXPECT_EQ(code_of([] { Image(0, 3, 3); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { Image(2, 2, 1, std::vector<float>(3)); }), Errc::shape_mismatch);
}

TEST(Image, PlanarIndexing) {
  const Image img = test::ramp_image(5, 4, 3);
  EXPECT_EQ(img.index(2, 1, 3), 2u * 20 + 1 * 5 + 3);
  EXPECT_FLOAT_EQ(img.at(1, 2, 4), (1000.0f + 2 * 5 + 4) / 1e4f);
}

TEST(CropToMultiple, FloorsEachAxis) {
  const Image img = test::ramp_image(101, 77, 3);
  const Image out = crop_to_multiple(img, 8);
  EXPECT_EQ(out.width(), 96);
  EXPECT_EQ(out.height(), 72);
  EXPECT_EQ(out.at(2, 71, 95), img.at(2, 71, 95));
  EXPECT_EQ(out.at(0, 0, 0), img.at(0, 0, 0));
}

TEST(CropToMultiple, AlreadyDivisibleIsUnchanged) {
  const Image img = test::random_image(256, 256, 3, 1);
  EXPECT_TRUE(bit_equal(crop_to_multiple(img, 8), img));
}

TEST(CropToMultiple, EightByFifteen) {
  const Image out = crop_to_multiple(test::ramp_image(8, 15, 3), 8);
  EXPECT_EQ(out.width(), 8);
  EXPECT_EQ(out.height(), 8);
}

TEST(CropToMultiple, TooSmallIsAnError) {
  EXPECT_EQ(code_of([] { crop_to_multiple(Image(7, 100, 3), 8); }), Errc::too_small);
  EXPECT_EQ(code_of([] { crop_to_multiple(Image(100, 5, 3), 8); }), Errc::too_small);
}

TEST(CropToMultiple, Idempotent) {
  for (int w : {8, 9, 17, 33, 64}) {
    for (int h : {8, 15, 40}) {
      const Image once = crop_to_multiple(test::random_image(w, h, 3, w * 100 + h), 8);
      EXPECT_TRUE(bit_equal(crop_to_multiple(once, 8), once)) << w << "x" << h;
    }
  }
}

TEST(Crop, FullRectIsIdentity) {
  const Image img = test::random_image(9, 6, 3, 2);
  EXPECT_TRUE(bit_equal(crop(img, {0, 0, 9, 6}), img));
}

TEST(Crop, SinglePixelOfRamp) {
  const Image img = test::ramp_image(7, 5, 3);
  const Image px = crop(img, {2, 3, 1, 1});
  ASSERT_EQ(px.size(), 3u);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(px.at(c, 0, 0), (c * 1000.0f + 3 * 7 + 2) / 1e4f);
}

TEST(Crop, OutOfBounds) {
  const Image img(6, 6, 3);
  EXPECT_EQ(code_of([&] { crop(img, {4, 0, 3, 2}); }), Errc::out_of_bounds);
  EXPECT_EQ(code_of([&] { crop(img, {-1, 0, 2, 2}); }), Errc::out_of_bounds);
  EXPECT_EQ(code_of([&] { crop(img, {0, 0, 0, 2}); }), Errc::out_of_bounds);
}

TEST(Paste, CropPasteRoundTrip) {
  const Image img = test::random_image(12, 10, 3, 3);
  const Rect r{3, 2, 5, 6};
  Image copy = img;
  paste(copy, crop(img, r), r.x0, r.y0);
  EXPECT_TRUE(bit_equal(copy, img));
}

TEST(Paste, LastWriterWinsAndBounds) {
  Image dst(4, 4, 1, 0.0f);
  paste(dst, Image(2, 2, 1, 1.0f), 1, 1);
  paste(dst, Image(2, 2, 1, 2.0f), 2, 2);
  EXPECT_EQ(dst.at(0, 1, 1), 1.0f);
  EXPECT_EQ(dst.at(0, 2, 2), 2.0f);
  EXPECT_EQ(code_of([&] { paste(dst, Image(2, 2, 1), 3, 0); }), Errc::out_of_bounds);
  EXPECT_EQ(code_of([&] { paste(dst, Image(2, 2, 3), 0, 0); }), Errc::shape_mismatch);
}

TEST(RawF32, SizeArithmetic) {
  TempDir dir;
  Image img(2, 1, 1, std::vector<float>{0.25f, 0.75f});
  save_raw_f32(img, dir / "a.dnb");
  const auto bytes = read_bytes(dir / "a.dnb");
  ASSERT_EQ(bytes.size(), 24u);
  EXPECT_EQ(std::memcmp(bytes.data(), "DNB1", 4), 0);
  EXPECT_EQ(bytes[4], 2);
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[12], 1);
  float first = 0.0f;
  std::memcpy(&first, bytes.data() + 16, 4);
  EXPECT_EQ(first, 0.25f);
}

TEST(RawF32, RoundTripIsBitExactIncludingNaN) {
  TempDir dir;
  Image img = test::random_image(7, 5, 3, 4, -2.0f, 3.0f);
  img.data()[3] = std::bit_cast<float>(0x7fc12345u);
  img.data()[4] = -0.0f;
  img.data()[5] = std::numeric_limits<float>::infinity();
  save_raw_f32(img, dir / "x.dnb");
  const Image back = load_raw_f32(dir / "x.dnb");
  EXPECT_TRUE(bit_equal(back, img));
  EXPECT_EQ(std::bit_cast<std::uint32_t>(back.data()[3]), 0x7fc12345u);
}

TEST(RawF32, BadMagicAndTruncation) {
  TempDir dir;
  {
    std::ofstream f(dir / "bad.dnb", std::ios::binary);
    f << "XXXX0000000000000000";
  }
  EXPECT_EQ(code_of([&] { load_raw_f32(dir / "bad.dnb"); }), Errc::bad_magic);
  save_raw_f32(Image(4, 4, 3), dir / "t.dnb");
  std::filesystem::resize_file(dir / "t.dnb", 16 + 4 * 4 * 3 * 4 - 1);
  EXPECT_EQ(code_of([&] { load_raw_f32(dir / "t.dnb"); }), Errc::truncated);
  std::filesystem::resize_file(dir / "t.dnb", 10);
  EXPECT_EQ(code_of([&] { load_raw_f32(dir / "t.dnb"); }), Errc::truncated);
  EXPECT_EQ(code_of([&] { load_raw_f32(dir / "missing.dnb"); }), Errc::io_unreadable);
}

TEST(LoadPng, RgbPixelExactDivision) {
  PngInfo info;
  const Image img = load_png(test::data_dir() / "rgb_1x1.png", &info);
  ASSERT_EQ(img.channels(), 3);
  EXPECT_EQ(img.data()[0], 1.0f);
  EXPECT_EQ(img.data()[1], 0.0f);
  EXPECT_EQ(img.data()[2], 128.0f / 255.0f);
  EXPECT_EQ(info.bit_depth, 8);
}

TEST(LoadPng, GrayIsReplicated) {
  const Image zero = load_png(test::data_dir() / "gray_1x1_zero.png");
  ASSERT_EQ(zero.channels(), 3);
  for (float v : zero.data()) EXPECT_EQ(v, 0.0f);
  const Image g = load_png(test::data_dir() / "gray_2x1.png");
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(g.at(c, 0, 0), 10.0f / 255.0f);
    EXPECT_EQ(g.at(c, 0, 1), 200.0f / 255.0f);
  }
}

TEST(LoadPng, AlphaDiscarded) {
  const Image img = load_png(test::data_dir() / "rgba_2x1.png");
  ASSERT_EQ(img.channels(), 3);
  EXPECT_EQ(img.at(0, 0, 0), 1.0f / 255.0f);
  EXPECT_EQ(img.at(2, 0, 1), 252.0f / 255.0f);
}

TEST(LoadPng, SixteenBit) {
  PngInfo info;
  const Image img = load_png(test::data_dir() / "rgb16_2x1.png", &info);
  EXPECT_EQ(info.bit_depth, 16);
  EXPECT_EQ(img.at(0, 0, 0), 1.0f);
  EXPECT_EQ(img.at(1, 0, 0), 0.0f);
  EXPECT_EQ(img.at(2, 0, 0), 32768.0f / 65535.0f);
  EXPECT_EQ(img.at(0, 0, 1), 1.0f / 65535.0f);
  EXPECT_EQ(img.at(2, 0, 1), 65534.0f / 65535.0f);
}

TEST(LoadPng, PaletteExpanded) {
  const Image img = load_png(test::data_dir() / "palette_2x1.png");
  EXPECT_EQ(img.at(0, 0, 0), 100.0f / 255.0f);
  EXPECT_EQ(img.at(2, 0, 1), 7.0f / 255.0f);
}

TEST(LoadPng, DistinctErrors) {
  EXPECT_EQ(code_of([] { load_png(test::data_dir() / "bilevel_8x1.png"); }),
            Errc::unsupported_bit_depth);
  EXPECT_EQ(code_of([] { load_png(test::data_dir() / "nope.png"); }), Errc::io_unreadable);
  EXPECT_EQ(code_of([] { load_png(test::data_dir() / "make_fixtures.py"); }),
            Errc::io_unreadable);
}

TEST(SavePng, QuantizationAndClamping) {
  EXPECT_EQ(quantize_sample(0.5f, 8), 128);
  EXPECT_EQ(quantize_sample(-0.2f, 8), 0);
  EXPECT_EQ(quantize_sample(1.7f, 8), 255);
  EXPECT_EQ(quantize_sample(1.0f, 16), 65535);
  EXPECT_EQ(quantize_sample(std::nanf(""), 8), 0);

  TempDir dir;
  save_png(Image(3, 2, 3, 1.0f), dir / "white.png", 8);
  const Image back = load_png(dir / "white.png");
  for (float v : back.data()) EXPECT_EQ(v, 1.0f);

  Image mixed(2, 1, 3, std::vector<float>{0.5f, -0.2f, 1.7f, 0.0f, 0.25f, 0.75f});
  save_png(mixed, dir / "m.png", 8);
  const Image m = load_png(dir / "m.png");
  EXPECT_EQ(m.at(0, 0, 0), 128.0f / 255.0f);
  EXPECT_EQ(m.at(0, 0, 1), 0.0f);
  EXPECT_EQ(m.at(1, 0, 0), 1.0f);
}

TEST(SavePng, DeterministicBytes) {
  TempDir dir;
  const Image img = test::random_image(17, 9, 3, 5);
  save_png(img, dir / "a.png", 8);
  save_png(img, dir / "b.png", 8);
  EXPECT_EQ(read_bytes(dir / "a.png"), read_bytes(dir / "b.png"));
}

TEST(SavePng, RejectsBadChannelsAndPaths) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { save_png(Image(2, 2, 2), dir / "x.png", 8); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { save_png(Image(2, 2, 3), dir / "x.png", 12); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { save_png(Image(2, 2, 3), dir / "no" / "such" / "x.png", 8); }),
            Errc::io_unwritable);
}

TEST(PngRoundTrip, CorpusPixelBytesPreserved) {
  TempDir dir;
  for (int i = 0; i < 5; ++i) {
    const auto png = test::data_dir() / "corpus" / ("c" + std::to_string(i) + ".png");
    const auto expected = read_bytes(test::data_dir() / "corpus" / ("c" + std::to_string(i) + ".rgb"));
    const Image img = load_png(png);
    save_png(img, dir / "rt.png", 8);
    const Image back = load_png(dir / "rt.png");
    ASSERT_EQ(back.size(), expected.size());
    for (int y = 0; y < back.height(); ++y) {
      for (int x = 0; x < back.width(); ++x) {
        for (int c = 0; c < 3; ++c) {
          const auto byte = expected[(static_cast<std::size_t>(y) * back.width() + x) * 3 + c];
          ASSERT_EQ(quantize_sample(back.at(c, y, x), 8), byte) << png;
          ASSERT_EQ(back.at(c, y, x), byte / 255.0f);
        }
      }
    }
  }
}

TEST(PngRoundTrip, SixteenBitQuantizedData) {
  TempDir dir;
  const Image img = quantize(test::random_image(11, 7, 3, 6), 16);
  save_png(img, dir / "d.png", 16);
  EXPECT_TRUE(bit_equal(load_png(dir / "d.png"), img));
  const Image one = quantize(test::random_image(5, 4, 1, 7), 8);
  save_png(one, dir / "g.png", 8);
  const Image g = load_png(dir / "g.png");
  ASSERT_EQ(g.channels(), 3);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < one.plane_size(); ++i) EXPECT_EQ(g.plane(c)[i], one.data()[i]);
  }
}

TEST(Digest, SensitiveToShapeAndSamples) {
  const Image a = test::random_image(4, 4, 3, 8);
  Image b = a;
  EXPECT_EQ(digest(a), digest(b));
  b.data()[5] = std::nextafter(b.data()[5], 2.0f);
  EXPECT_NE(digest(a), digest(b));
  EXPECT_NE(digest(Image(4, 2, 1)), digest(Image(2, 4, 1)));
}
