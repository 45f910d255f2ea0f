#include "dnbench/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

#include "dnbench/error.hpp"

namespace dnb {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; everything touched after setjmp
// lives in this heap block so no C++ local is modified across the jump.
struct PngReadState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::vector<png_byte> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  int channels = 0;
  char message[256] = {};

  ~PngReadState() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriteState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  char message[256] = {};

  ~PngWriteState() { png_destroy_write_struct(&png, &info); }
};

template <class State>
void png_error_fn(png_structp png, png_const_charp msg) {
  auto* state = static_cast<State*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof state->message, "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

enum class ReadStatus { ok, libpng_error, unsupported_depth };

ReadStatus read_png_pixels(std::FILE* fp, PngReadState& s) {
  s.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &s, png_error_fn<PngReadState>,
                                 png_warning_fn);
  if (!s.png) return ReadStatus::libpng_error;
  s.info = png_create_info_struct(s.png);
  if (!s.info) return ReadStatus::libpng_error;
  if (setjmp(png_jmpbuf(s.png))) return ReadStatus::libpng_error;

  png_init_io(s.png, fp);
  png_read_info(s.png, s.info);
  s.width = png_get_image_width(s.png, s.info);
  s.height = png_get_image_height(s.png, s.info);
  s.bit_depth = png_get_bit_depth(s.png, s.info);
  s.color_type = png_get_color_type(s.png, s.info);

  if (s.color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(s.png);
    s.bit_depth = 8;
  } else if (s.bit_depth != 8 && s.bit_depth != 16) {
    return ReadStatus::unsupported_depth;
  }
  if (png_get_interlace_type(s.png, s.info) != PNG_INTERLACE_NONE) png_set_interlace_handling(s.png);
  png_read_update_info(s.png, s.info);
  s.channels = png_get_channels(s.png, s.info);

  const std::size_t rowbytes = png_get_rowbytes(s.png, s.info);
  s.pixels.resize(rowbytes * s.height);
  s.rows.resize(s.height);
  for (png_uint_32 y = 0; y < s.height; ++y) s.rows[y] = s.pixels.data() + y * rowbytes;
  png_read_image(s.png, s.rows.data());
  png_read_end(s.png, nullptr);
  return ReadStatus::ok;
}

}  // namespace

Image load_png(const std::filesystem::path& path, PngInfo* info) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw Error(Errc::io_unreadable, "cannot open " + path.string());

  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw Error(Errc::io_unreadable, path.string() + " is not a PNG file");
  }
  auto state = std::make_unique<PngReadState>();
  std::rewind(fp.get());

  switch (read_png_pixels(fp.get(), *state)) {
    case ReadStatus::ok: break;
    case ReadStatus::unsupported_depth:
      throw Error(Errc::unsupported_bit_depth,
                  path.string() + " has bit depth " + std::to_string(state->bit_depth));
    case ReadStatus::libpng_error:
      throw Error(Errc::io_unreadable, path.string() + ": " + state->message);
  }

  const int w = static_cast<int>(state->width);
  const int h = static_cast<int>(state->height);
  const int sc = state->channels;
  const bool wide = state->bit_depth == 16;
  const double scale = wide ? 1.0 / 65535.0 : 1.0 / 255.0;
  const int color_channels = sc >= 3 ? 3 : 1;

  Image img(w, h, 3);
  for (int y = 0; y < h; ++y) {
    const png_byte* row = state->rows[y];
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const int src_c = color_channels == 3 ? c : 0;
        const std::size_t k = static_cast<std::size_t>(x) * sc + src_c;
        const unsigned v = wide ? (unsigned{row[2 * k]} << 8) | row[2 * k + 1] : row[k];
        img.at(c, y, x) = static_cast<float>(v * scale);
      }
    }
  }
  if (info) {
    info->bit_depth = state->bit_depth;
    info->source_channels = sc;
  }
  return img;
}

std::uint16_t quantize_sample(float v, int depth) noexcept {
  const double levels = depth == 16 ? 65535.0 : 255.0;
  const double d = static_cast<double>(v);
  if (!(d > 0.0)) return 0;
  if (d >= 1.0) return static_cast<std::uint16_t>(levels);
  return static_cast<std::uint16_t>(std::floor(d * levels + 0.5));
}

void save_png(const Image& img, const std::filesystem::path& path, int depth) {
  if (depth != 8 && depth != 16) throw Error(Errc::invalid_argument, "PNG depth must be 8 or 16");
  if (img.channels() != 1 && img.channels() != 3) {
    throw Error(Errc::invalid_argument, "PNG export needs 1 or 3 channels");
  }
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();
  const int bytes_per_sample = depth / 8;

  std::vector<png_byte> pixels(static_cast<std::size_t>(w) * h * ch * bytes_per_sample);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        const std::uint16_t q = quantize_sample(img.at(c, y, x), depth);
        const std::size_t k = ((static_cast<std::size_t>(y) * w + x) * ch + c) * bytes_per_sample;
        if (depth == 16) {
          pixels[k] = static_cast<png_byte>(q >> 8);
          pixels[k + 1] = static_cast<png_byte>(q & 0xff);
        } else {
          pixels[k] = static_cast<png_byte>(q);
        }
      }
    }
  }
  std::vector<png_bytep> rows(h);
  const std::size_t rowbytes = static_cast<std::size_t>(w) * ch * bytes_per_sample;
  for (int y = 0; y < h; ++y) rows[y] = pixels.data() + y * rowbytes;

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error(Errc::io_unwritable, "cannot open " + path.string() + " for writing");

  auto s = std::make_unique<PngWriteState>();
  s->png = png_create_write_struct(PNG_LIBPNG_VER_STRING, s.get(), png_error_fn<PngWriteState>,
                                   png_warning_fn);
  if (!s->png) throw Error(Errc::io_unwritable, "libpng init failed");
  s->info = png_create_info_struct(s->png);
  if (!s->info) throw Error(Errc::io_unwritable, "libpng init failed");
  if (setjmp(png_jmpbuf(s->png))) {
    throw Error(Errc::io_unwritable, path.string() + ": " + s->message);
  }
  png_init_io(s->png, fp.get());
  png_set_compression_level(s->png, 6);
  png_set_IHDR(s->png, s->info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), depth,
               ch == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(s->png, s->info);
  png_write_image(s->png, rows.data());
  png_write_end(s->png, nullptr);
  if (std::fflush(fp.get()) != 0) {
    throw Error(Errc::io_unwritable, "flush failed for " + path.string());
  }
}

namespace {

void put_u32le(char* out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out[b] = static_cast<char>((v >> (8 * b)) & 0xff);
}

std::uint32_t get_u32le(const unsigned char* in) {
  return std::uint32_t{in[0]} | (std::uint32_t{in[1]} << 8) | (std::uint32_t{in[2]} << 16) |
         (std::uint32_t{in[3]} << 24);
}

}  // namespace

void save_raw_f32(const Image& img, const std::filesystem::path& path) {
  std::vector<char> buf(kRawHeaderBytes + img.size() * 4);
  std::copy(std::begin(kRawMagic), std::end(kRawMagic), buf.begin());
  put_u32le(buf.data() + 4, static_cast<std::uint32_t>(img.width()));
  put_u32le(buf.data() + 8, static_cast<std::uint32_t>(img.height()));
  put_u32le(buf.data() + 12, static_cast<std::uint32_t>(img.channels()));
  char* p = buf.data() + kRawHeaderBytes;
  for (float v : img.data()) {
    put_u32le(p, std::bit_cast<std::uint32_t>(v));
    p += 4;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_unwritable, "cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(Errc::io_unwritable, "write failed for " + path.string());
}

Image load_raw_f32(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_unreadable, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 4 || !std::equal(std::begin(kRawMagic), std::end(kRawMagic), bytes.begin(),
                                      [](char a, unsigned char b) { return a == static_cast<char>(b); })) {
    throw Error(Errc::bad_magic, path.string() + " does not start with DNB1");
  }
  if (bytes.size() < kRawHeaderBytes) throw Error(Errc::truncated, path.string() + ": short header");
  const std::uint32_t w = get_u32le(bytes.data() + 4);
  const std::uint32_t h = get_u32le(bytes.data() + 8);
  const std::uint32_t c = get_u32le(bytes.data() + 12);
  const std::uint64_t count = std::uint64_t{w} * h * c;
  if (w == 0 || h == 0 || c == 0 || w > (1u << 30) || h > (1u << 30)) {
    throw Error(Errc::truncated, path.string() + ": invalid dimensions in header");
  }
  if (bytes.size() - kRawHeaderBytes < count * 4) {
    throw Error(Errc::truncated, path.string() + ": payload holds " +
                                     std::to_string((bytes.size() - kRawHeaderBytes) / 4) +
                                     " of " + std::to_string(count) + " samples");
  }
  std::vector<float> data(count);
  const unsigned char* p = bytes.data() + kRawHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i, p += 4) data[i] = std::bit_cast<float>(get_u32le(p));
  return Image(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c), std::move(data));
}

}  // namespace dnb
