#pragma once

#include <cstdint>
#include <filesystem>

#include "dnbench/image.hpp"

namespace dnb {

struct PngInfo {
  int bit_depth = 8;        ///< 8 or 16 after palette expansion
  int source_channels = 3;  ///< channel count stored in the file (1-4)
};

/// Loads an 8- or 16-bit grayscale/RGB/RGBA (or palette) PNG as a 3-channel
/// image. 8-bit samples map to v/255, 16-bit samples to v/65535. Alpha is
/// dropped and grayscale is replicated across channels.
Image load_png(const std::filesystem::path& path, PngInfo* info = nullptr);

/// Writes a 1- or 3-channel image. Samples are clamped to [0,1] and
/// quantized by round-half-up of v * (2^depth - 1); NaN maps to 0.
void save_png(const Image& img, const std::filesystem::path& path, int depth = 8);

std::uint16_t quantize_sample(float v, int depth) noexcept;

// "DNB1" raw float interchange: magic, then width/height/channels as
// little-endian u32, then planar little-endian IEEE-754 binary32 samples.
inline constexpr char kRawMagic[4] = {'D', 'N', 'B', '1'};
inline constexpr std::size_t kRawHeaderBytes = 16;

Image load_raw_f32(const std::filesystem::path& path);
void save_raw_f32(const Image& img, const std::filesystem::path& path);

}  // namespace dnb
