#include "dnbench/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "dnbench/error.hpp"

namespace dnb {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73Bull;

__extension__ typedef unsigned __int128 u128;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const u128 p = static_cast<u128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

inline float apply_noise(float y, double sigma, double z, ClipMode clip) {
  float x = sigma == 0.0 ? y : static_cast<float>(static_cast<double>(y) + sigma * z);
  if (clip == ClipMode::clip01) x = std::clamp(x, 0.0f, 1.0f);
  return x;
}

}  // namespace

PhiloxCounter philox4x64_10(PhiloxCounter x, PhiloxKey k) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kPhiloxW0;
      k[1] += kPhiloxW1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, x[0], hi0, lo0);
    mulhilo(kPhiloxM1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
  }
  return x;
}

PhiloxCounter RngStream::block(std::uint64_t block_index) const noexcept {
  return philox4x64_10({block_index, 0, 0, 0}, key_);
}

std::uint64_t RngStream::draw(std::uint64_t index) const noexcept {
  return block(index / 4)[index % 4];
}

std::array<double, 4> box_muller(const PhiloxCounter& u) noexcept {
  std::array<double, 4> z{};
  for (int p = 0; p < 2; ++p) {
    const double r = std::sqrt(-2.0 * std::log(to_unit_open_closed(u[2 * p])));
    const double theta = 2.0 * std::numbers::pi * to_unit_closed_open(u[2 * p + 1]);
    z[2 * p] = r * std::cos(theta);
    z[2 * p + 1] = r * std::sin(theta);
  }
  return z;
}

double RngStream::normal(std::uint64_t index) const noexcept {
  return box_muller(block(index / 4))[index % 4];
}

RngStream derive_stream(std::uint64_t seed, std::string_view image_id) noexcept {
  return RngStream(seed, mix64(fnv1a64(image_id) ^ mix64(seed)));
}

std::string_view to_string(ClipMode mode) noexcept {
  return mode == ClipMode::clip01 ? "clip01" : "none";
}

ClipMode parse_clip_mode(std::string_view text) {
  if (text == "none") return ClipMode::none;
  if (text == "clip01") return ClipMode::clip01;
  throw Error(Errc::invalid_argument, "unknown clip mode '" + std::string(text) + "'");
}

void NoiseSpec::validate() const {
  if (!(sigma_8bit >= 0.0) || !std::isfinite(sigma_8bit)) {
    throw Error(Errc::invalid_argument, "sigma must be a finite value >= 0");
  }
}

std::string NoiseSpec::digest() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "sigma=%.17g;seed=%llu;clip=%s", sigma_8bit,
                static_cast<unsigned long long>(seed), std::string(to_string(clip)).c_str());
  return buf;
}

Image add_gaussian_noise(const Image& clean, const NoiseSpec& spec, const RngStream& stream) {
  spec.validate();
  Image out = clean;
  const double sigma = spec.sigma();
  const auto n = static_cast<std::int64_t>(out.size());
  const std::int64_t blocks = (n + 3) / 4;
  float* data = out.data().data();

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const auto z = box_muller(stream.block(static_cast<std::uint64_t>(b)));
    const std::int64_t end = std::min<std::int64_t>(4 * b + 4, n);
    for (std::int64_t i = 4 * b; i < end; ++i) {
      data[i] = apply_noise(data[i], sigma, z[i - 4 * b], spec.clip);
    }
  }
  return out;
}

namespace reference {

Image add_gaussian_noise_serial(const Image& clean, const NoiseSpec& spec,
                                const RngStream& stream) {
  spec.validate();
  Image out = clean;
  const double sigma = spec.sigma();
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = apply_noise(data[i], sigma, stream.normal(i), spec.clip);
  }
  return out;
}

}  // namespace reference

}  // namespace dnb
