#include "dnbench/ensemble.hpp"

#include <exception>
#include <string>
#include <vector>

#include "dnbench/error.hpp"

namespace dnb {

namespace {

constexpr std::array<Dihedral, 1> kOff = {Dihedral::identity};
constexpr std::array<Dihedral, 4> kFlips = {Dihedral::identity, Dihedral::hflip, Dihedral::vflip,
                                            Dihedral::rot180};

Image run_term(const DenoiseFn& f, const Image& x, Dihedral t) {
  try {
    Image y = f(apply(t, x));
    Image back = apply(inverse(t), y);
    if (!same_shape(back, x)) {
      throw Error(Errc::shape_mismatch, "denoiser changed the image shape");
    }
    return back;
  } catch (const Error& e) {
    throw Error(e.code(), "ensemble element " + std::string(to_string(t)) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(Errc::backend_failed,
                "ensemble element " + std::string(to_string(t)) + ": " + e.what());
  }
}

void accumulate(std::vector<double>& acc, const Image& term) {
  auto src = term.data();
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += static_cast<double>(src[i]);
}

}  // namespace

std::string_view to_string(EnsembleMode mode) noexcept {
  switch (mode) {
    case EnsembleMode::off: return "off";
    case EnsembleMode::flips4: return "flips4";
    case EnsembleMode::full8: return "full8";
  }
  return "?";
}

EnsembleMode parse_ensemble_mode(std::string_view text) {
  if (text == "off") return EnsembleMode::off;
  if (text == "flips4") return EnsembleMode::flips4;
  if (text == "full8") return EnsembleMode::full8;
  throw Error(Errc::invalid_argument, "unknown ensemble mode '" + std::string(text) + "'");
}

std::span<const Dihedral> ensemble_elements(EnsembleMode mode) noexcept {
  switch (mode) {
    case EnsembleMode::off: return kOff;
    case EnsembleMode::flips4: return kFlips;
    case EnsembleMode::full8: return kAllDihedral;
  }
  return kOff;
}

Image self_ensemble(const DenoiseFn& f, const Image& x, std::span<const Dihedral> elements,
                    EnsembleOptions options) {
  if (elements.empty()) throw Error(Errc::invalid_argument, "self-ensemble needs >= 1 element");
  std::vector<double> acc(x.size(), 0.0);

  if (options.parallel_terms && elements.size() > 1) {
    const int k = static_cast<int>(elements.size());
    std::vector<Image> terms(k);
    std::vector<std::exception_ptr> failures(k);
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < k; ++i) {
      try {
        terms[i] = run_term(f, x, elements[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
    for (int i = 0; i < k; ++i) {
      if (failures[i]) std::rethrow_exception(failures[i]);
    }
    for (const Image& term : terms) accumulate(acc, term);
  } else {
    for (Dihedral t : elements) accumulate(acc, run_term(f, x, t));
  }

  Image out(x.width(), x.height(), x.channels());
  const double k = static_cast<double>(elements.size());
  auto dst = out.data();
  for (std::size_t i = 0; i < acc.size(); ++i) dst[i] = static_cast<float>(acc[i] / k);
  return out;
}

}  // namespace dnb
