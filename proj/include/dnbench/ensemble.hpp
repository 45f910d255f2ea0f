#pragma once

#include <functional>
#include <span>
#include <string_view>

#include "dnbench/dihedral.hpp"
#include "dnbench/image.hpp"

namespace dnb {

using DenoiseFn = std::function<Image(const Image&)>;

enum class EnsembleMode { off, flips4, full8 };

std::string_view to_string(EnsembleMode mode) noexcept;
EnsembleMode parse_ensemble_mode(std::string_view text);

/// off = {identity}; flips4 = {identity, hflip, vflip, rot180};
/// full8 = every element of the group.
std::span<const Dihedral> ensemble_elements(EnsembleMode mode) noexcept;

struct EnsembleOptions {
  /// Run the per-element forward passes concurrently. The reduction still
  /// happens in element order, so the output does not depend on this flag.
  bool parallel_terms = false;
};

/// Geometric self-ensemble: mean over t of inverse(t)(f(t(x))). Terms are
/// accumulated in double precision in the order given by `elements` and
/// divided by their count. A failing term is rethrown with the element name
/// prefixed to the message.
Image self_ensemble(const DenoiseFn& f, const Image& x,
                    std::span<const Dihedral> elements = kAllDihedral,
                    EnsembleOptions options = {});

}  // namespace dnb
