#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "dnbench/backend.hpp"
#include "dnbench/ensemble.hpp"
#include "dnbench/keyvalue.hpp"
#include "dnbench/metrics.hpp"
#include "dnbench/noise.hpp"
#include "dnbench/tiling.hpp"

namespace dnb {

/// Everything that determines an evaluation run. Noise is synthesized from
/// `noise` unless `noisy_dir` is set, in which case noisy inputs are read
/// from PNGs with the same file names as the clean images.
///
/// Config file keys (flat key = value, see keyvalue.hpp):
///   clean_dir, noisy_dir, sigma, seed, clip_noise (none|clip01),
///   backend (spec string), external_cmd, external_workdir,
///   external_timeout, external_max_concurrent, ensemble (off|flips4|full8),
///   tiled (true|false), tile_window, tile_overlap, blend (uniform|hann),
///   as_8bit (true|false), psnr_pooling (joint|per_channel_mean), workers
struct RunConfig {
  std::filesystem::path clean_dir;
  std::optional<std::filesystem::path> noisy_dir;
  NoiseSpec noise;
  BackendSpec backend;
  EnsembleMode ensemble = EnsembleMode::off;
  bool tiled = false;
  TileSpec tile;
  bool as_8bit = false;
  PsnrPooling pooling = PsnrPooling::joint;
  int workers = 1;

  bool synthesize_noise() const noexcept { return !noisy_dir.has_value(); }

  /// Checks value ranges and that the referenced directories exist.
  void validate() const;

  /// Settings that affect results, in fixed key order. Worker count is
  /// excluded because results do not depend on it.
  KeyValues canonical() const;
  /// Hex FNV-1a of the rendered canonical settings.
  std::string digest() const;
};

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

std::string_view to_string(PsnrPooling pooling) noexcept;
PsnrPooling parse_psnr_pooling(std::string_view text);

}  // namespace dnb
