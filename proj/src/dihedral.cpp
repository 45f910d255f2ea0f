#include "dnbench/dihedral.hpp"

#include <algorithm>

namespace dnb {

namespace {

// Every element factors as: optional transpose, then optional x flip, then
// optional y flip. The same factorization, viewed as a signed permutation
// matrix on centred coordinates, gives composition by matrix product.
struct Factor {
  bool transpose;
  bool flip_x;
  bool flip_y;
};

constexpr Factor factor(Dihedral t) noexcept {
  switch (t) {
    case Dihedral::identity: return {false, false, false};
    case Dihedral::rot90: return {true, false, true};
    case Dihedral::rot180: return {false, true, true};
    case Dihedral::rot270: return {true, true, false};
    case Dihedral::hflip: return {false, true, false};
    case Dihedral::vflip: return {false, false, true};
    case Dihedral::transpose: return {true, false, false};
    case Dihedral::anti_transpose: return {true, true, true};
  }
  return {false, false, false};
}

using Mat2 = std::array<int, 4>;  // row-major 2x2

constexpr Mat2 matrix(Dihedral t) noexcept {
  const Factor f = factor(t);
  const int sx = f.flip_x ? -1 : 1;
  const int sy = f.flip_y ? -1 : 1;
  return f.transpose ? Mat2{0, sx, sy, 0} : Mat2{sx, 0, 0, sy};
}

constexpr Mat2 multiply(const Mat2& a, const Mat2& b) noexcept {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

constexpr Dihedral from_matrix(const Mat2& m) noexcept {
  for (Dihedral t : kAllDihedral) {
    if (matrix(t) == m) return t;
  }
  return Dihedral::identity;
}

}  // namespace

std::string_view to_string(Dihedral t) noexcept {
  switch (t) {
    case Dihedral::identity: return "identity";
    case Dihedral::rot90: return "rot90";
    case Dihedral::rot180: return "rot180";
    case Dihedral::rot270: return "rot270";
    case Dihedral::hflip: return "hflip";
    case Dihedral::vflip: return "vflip";
    case Dihedral::transpose: return "transpose";
    case Dihedral::anti_transpose: return "anti_transpose";
  }
  return "?";
}

std::optional<Dihedral> parse_dihedral(std::string_view name) noexcept {
  for (Dihedral t : kAllDihedral) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

Dihedral compose(Dihedral outer, Dihedral inner) noexcept {
  return from_matrix(multiply(matrix(outer), matrix(inner)));
}

Dihedral inverse(Dihedral t) noexcept {
  const Mat2 m = matrix(t);
  return from_matrix({m[0], m[2], m[1], m[3]});
}

bool swaps_axes(Dihedral t) noexcept { return factor(t).transpose; }

Image apply(Dihedral t, const Image& img) {
  if (t == Dihedral::identity) return img;
  const Factor f = factor(t);
  const int w = img.width();
  const int h = img.height();
  const int out_w = f.transpose ? h : w;
  const int out_h = f.transpose ? w : h;
  Image out(out_w, out_h, img.channels());
  const int rows = img.channels() * out_h;

#pragma omp parallel for schedule(static) if (img.size() > (1u << 16))
  for (int cy = 0; cy < rows; ++cy) {
    const int c = cy / out_h;
    const int y = cy % out_h;
    float* dst = out.row(c, y);
    const int ty = f.flip_y ? out_h - 1 - y : y;
    if (!f.transpose) {
      const float* src = img.row(c, ty);
      if (f.flip_x) {
        std::reverse_copy(src, src + w, dst);
      } else {
        std::copy(src, src + w, dst);
      }
    } else {
      // Transposed intermediate T(u, v) = src(v, u); source column ty.
      for (int x = 0; x < out_w; ++x) {
        const int tx = f.flip_x ? out_w - 1 - x : x;
        dst[x] = img.at(c, tx, ty);
      }
    }
  }
  return out;
}

}  // namespace dnb
