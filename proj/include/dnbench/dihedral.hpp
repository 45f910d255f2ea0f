#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "dnbench/image.hpp"

namespace dnb {

/// The eight symmetries of the square acting on images as exact pixel
/// permutations. Rotations are counter-clockwise. With W x H the source
/// size, the destination pixel (x', y') reads:
///
///   identity        src(x', y')
///   rot90           src(W-1-y', x')          (output is H x W)
///   rot180          src(W-1-x', H-1-y')
///   rot270          src(y', H-1-x')          (output is H x W)
///   hflip           src(W-1-x', y')
///   vflip           src(x', H-1-y')
///   transpose       src(y', x')              (output is H x W)
///   anti_transpose  src(W-1-y', H-1-x')      (output is H x W)
enum class Dihedral : std::uint8_t {
  identity,
  rot90,
  rot180,
  rot270,
  hflip,
  vflip,
  transpose,
  anti_transpose,
};

inline constexpr std::array<Dihedral, 8> kAllDihedral = {
    Dihedral::identity, Dihedral::rot90,  Dihedral::rot180,    Dihedral::rot270,
    Dihedral::hflip,    Dihedral::vflip,  Dihedral::transpose, Dihedral::anti_transpose,
};

std::string_view to_string(Dihedral t) noexcept;
std::optional<Dihedral> parse_dihedral(std::string_view name) noexcept;

/// Element equal to applying `inner` first and then `outer`:
/// apply(compose(outer, inner), x) == apply(outer, apply(inner, x)).
Dihedral compose(Dihedral outer, Dihedral inner) noexcept;
Dihedral inverse(Dihedral t) noexcept;
bool swaps_axes(Dihedral t) noexcept;

Image apply(Dihedral t, const Image& img);

}  // namespace dnb
