#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "dnbench/image.hpp"

namespace dnb {

// FNV-1a, 64-bit (offset basis 0xcbf29ce484222325, prime 0x100000001b3).
constexpr std::uint64_t fnv1a64_init() noexcept { return 0xcbf29ce484222325ull; }
constexpr std::uint64_t fnv1a64_update(std::uint64_t h, std::uint8_t byte) noexcept {
  return (h ^ byte) * 0x100000001b3ull;
}
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = fnv1a64_init();
  for (char ch : s) h = fnv1a64_update(h, static_cast<std::uint8_t>(ch));
  return h;
}

/// SplitMix64 output finalizer (Steele, Lea & Flood).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

/// Philox4x64 with 10 rounds (Salmon et al., Random123). Stateless: the
/// output block is a pure function of (counter, key).
PhiloxCounter philox4x64_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// A counter-based random stream. Draw i is block i/4, lane i%4 of
/// Philox4x64-10 keyed by {seed, stream_id} with counter {i/4, 0, 0, 0}, so
/// any draw can be computed independently of every other draw.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept : key_{seed, stream_id} {}

  std::uint64_t seed() const noexcept { return key_[0]; }
  std::uint64_t stream_id() const noexcept { return key_[1]; }

  std::uint64_t draw(std::uint64_t index) const noexcept;
  PhiloxCounter block(std::uint64_t block_index) const noexcept;

  /// Standard normal number `index` of the stream. Normals come in
  /// Box-Muller pairs: pair p consumes uniform draws 2p (radius) and 2p+1
  /// (angle); even indices take the cosine branch and odd the sine branch.
  double normal(std::uint64_t index) const noexcept;

  bool operator==(const RngStream&) const = default;

 private:
  PhiloxKey key_;
};

/// Uniform in (0,1] from the top 53 bits.
constexpr double to_unit_open_closed(std::uint64_t x) noexcept {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}
/// Uniform in [0,1) from the top 53 bits.
constexpr double to_unit_closed_open(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Box-Muller transform of one uniform block into four normals.
std::array<double, 4> box_muller(const PhiloxCounter& uniforms) noexcept;

/// stream_id = mix64(fnv1a64(image_id) ^ mix64(seed)).
RngStream derive_stream(std::uint64_t seed, std::string_view image_id) noexcept;

enum class ClipMode { none, clip01 };

std::string_view to_string(ClipMode mode) noexcept;
ClipMode parse_clip_mode(std::string_view text);

struct NoiseSpec {
  double sigma_8bit = 50.0;
  std::uint64_t seed = 0;
  ClipMode clip = ClipMode::none;

  /// Standard deviation on the [0,1] sample scale.
  double sigma() const noexcept { return sigma_8bit / 255.0; }
  void validate() const;
  /// Stable text digest "sigma=<..>;seed=<..>;clip=<..>".
  std::string digest() const;
};

/// x[i] = y[i] + sigma * z_i where z_i = stream.normal(i) and i is the planar
/// sample index. With ClipMode::clip01 the result is clamped afterwards.
Image add_gaussian_noise(const Image& clean, const NoiseSpec& spec, const RngStream& stream);

namespace reference {
Image add_gaussian_noise_serial(const Image& clean, const NoiseSpec& spec, const RngStream& stream);
}

}  // namespace dnb
