#pragma once

#include <string>
#include <vector>

#include "dnbench/config.hpp"
#include "dnbench/report.hpp"

namespace dnb {

/// One cell of the ablation matrix.
struct Variant {
  std::string name;
  bool tiled = false;
  EnsembleMode ensemble = EnsembleMode::off;
};

/// "Direct, 1-pass", "Wrapped, x8", ... ("x4" for the flips4 ensemble).
std::string variant_name(bool tiled, EnsembleMode ensemble);

/// The single variant described by cfg.tiled and cfg.ensemble.
Variant variant_from_config(const RunConfig& cfg);

/// {direct, wrapped} x {1-pass, ensemble}. The ensemble column uses
/// cfg.ensemble, or full8 when the config has the ensemble switched off.
std::vector<Variant> ablation_variants(const RunConfig& cfg);

/// Evaluates every clean PNG in cfg.clean_dir (sorted by file name, id =
/// file stem) under each variant. Per image: load, crop to a multiple of 8,
/// build the noisy input once, then for each variant time the wrapper chain
/// only, optionally quantize output and reference to 8 bits, and score
/// PSNR/SSIM against the cropped clean image. Images run concurrently on
/// cfg.workers threads; records are assembled by variant then image id, so
/// the canonical report does not depend on the worker count. Per-image
/// failures are recorded in the report. An empty directory is
/// Errc::empty_input.
AblationReport run_variants(const RunConfig& cfg, const std::vector<Variant>& variants);

AblationReport run_eval(const RunConfig& cfg);

/// Four variants plus the ensemble and wrapper delta rows.
AblationReport run_ablation_matrix(const RunConfig& cfg);

/// Ensemble effect at each wrapper setting, then wrapper effect at each
/// ensemble setting. Expects the four variants in ablation_variants order.
std::vector<DeltaRow> ablation_deltas(const std::vector<VariantSummary>& variants);

/// 0 when every image succeeded, 2 when some failed.
int exit_code(const AblationReport& report) noexcept;

}  // namespace dnb
