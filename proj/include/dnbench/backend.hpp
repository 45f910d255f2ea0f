#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "dnbench/ensemble.hpp"
#include "dnbench/image.hpp"
#include "dnbench/noise.hpp"

namespace dnb {

enum class BackendKind { identity, gaussian_blur, hbox_blur, nlm, dct_threshold, external };

std::string_view to_string(BackendKind kind) noexcept;
BackendKind parse_backend_kind(std::string_view text);

/// Text form: kind[:key=value[,key=value...]], e.g. "nlm:patch=5,h=0.1".
/// Recognized keys per kind:
///   gaussian_blur   std (default 1.0)
///   hbox_blur       radius (default 2)
///   nlm             patch (7), search (21), h (0.4 * sigma_n, or 0.08 when sigma_n
///                   is 0), sigma_n (noise sigma)
///   dct_threshold   block (8), threshold (3 * noise sigma)
///   external        cmd, workdir, timeout (600), max_concurrent (1), deterministic (false)
/// The external command usually contains commas, so it is normally set
/// through its own flag or config key rather than in this string.
struct BackendSpec {
  std::string name;
  BackendKind kind = BackendKind::identity;
  std::map<std::string, std::string> params;

  /// Canonical "kind:k=v,..." form with keys sorted.
  std::string canonical() const;
  bool operator==(const BackendSpec&) const = default;
};

BackendSpec parse_backend_spec(std::string_view text);

class Denoiser {
 public:
  virtual ~Denoiser() = default;

  virtual Image denoise(const Image& x) const = 0;
  virtual bool deterministic() const noexcept { return true; }
  /// Total wall time spent in external subprocesses so far, in ms.
  virtual double subprocess_ms() const noexcept { return 0.0; }

  const std::string& name() const noexcept { return name_; }

 protected:
  explicit Denoiser(std::string name) : name_(std::move(name)) {}

 private:
  std::string name_;
};

/// Builds a backend. `noise` supplies defaults for noise-aware parameters
/// (NLM sigma_n and h, DCT threshold). Unknown or malformed parameters are
/// rejected with Errc::invalid_argument.
std::shared_ptr<const Denoiser> make_denoiser(const BackendSpec& spec, const NoiseSpec& noise = {});

/// Checks the 3-channel precondition and the shape-preservation contract.
Image denoise(const Denoiser& backend, const Image& x);

DenoiseFn as_function(std::shared_ptr<const Denoiser> backend);

}  // namespace dnb
