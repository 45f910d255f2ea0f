#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dnbench/image.hpp"

namespace dnb {

enum class Stage { I, II };

std::string_view to_string(Stage stage) noexcept;
Stage parse_stage(std::string_view text);

struct PatchPhase {
  int patch_px = 0;
  int batch = 0;
  bool operator==(const PatchPhase&) const = default;
};

/// Training-stage description. Optimizer fields are inert metadata; nothing
/// in this library trains.
struct StageConfig {
  Stage stage = Stage::I;
  std::vector<std::string> sources;
  std::vector<PatchPhase> patch_schedule;
  long iterations = 0;
  double initial_lr = 0.0;
  std::string optimizer = "AdamW";
  std::string loss = "MSE";

  /// Patch sizes positive multiples of 8, strictly increasing; batches >= 1.
  void validate() const;
  int max_patch() const;
  bool operator==(const StageConfig&) const = default;
};

/// Stage I: DIV2K/Flickr2K/OST/LSDIR, patches 256->448->768 with batches
/// 4->2->1, 300K iterations, lr 1e-4. Stage II adds LIU4K-v2/NKUSR8K/DIV8K,
/// patch 768 batch 4, 300K iterations, lr 1e-5.
std::pair<StageConfig, StageConfig> default_stage_configs();

std::string serialize(const StageConfig& cfg);
StageConfig parse_stage_config(std::string_view text);

/// Splits `extent` into `parts` contiguous lengths differing by at most one,
/// longer pieces first (5000 / 3 -> 1667, 1667, 1666).
std::vector<int> equal_split(int extent, int parts);

struct GridTile {
  int row = 0;
  int col = 0;
  Rect rect;
};

/// ceil(dim / target) tiles per axis with equal_split sizes, row-major.
std::vector<GridTile> subimage_grid(int width, int height, int target_long_side);

struct ManifestEntry {
  std::string source;
  std::optional<Rect> rect;
  std::optional<std::string> out;  ///< empty for discarded tiles and failures
  bool discarded = false;
  std::string error;               ///< non-empty when the source failed to load

  bool operator==(const ManifestEntry&) const = default;
};

struct SubimageSummary {
  std::size_t sources = 0;
  std::size_t sources_failed = 0;
  std::size_t tiles_emitted = 0;
  std::size_t tiles_discarded = 0;
};

struct SubimageResult {
  std::vector<ManifestEntry> entries;
  SubimageSummary summary;
};

/// Cuts every *.png in src_dir into grid tiles written as
/// "{stem}_r{row}c{col}.png" at the source bit depth. Tiles narrower than
/// min_side on either axis are discarded; unreadable sources are logged in
/// the manifest instead of aborting. Entries are ordered by source name.
SubimageResult make_subimages(const std::filesystem::path& src_dir,
                              const std::filesystem::path& dst_dir, int target_long_side = 2048,
                              int min_side = 256);

/// JSON lines, one object per entry: {"source", "rect": [x0,y0,w,h], "out"}
/// plus "discarded"/"error" when set.
std::string manifest_to_jsonl(const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> manifest_from_jsonl(std::string_view text);
std::string summary_to_json(const SubimageSummary& s);

struct PatchSample {
  std::string source_path;
  Rect rect;
  Stage stage = Stage::I;
  std::size_t draw_index = 0;
  bool operator==(const PatchSample&) const = default;
};

struct SampleResult {
  std::vector<PatchSample> samples;
  std::size_t filtered = 0;  ///< manifest tiles smaller than the largest patch
};

/// Draw i uses schedule phase floor(i * phases / n); the tile is picked
/// uniformly among eligible tiles and the origin uniformly over valid
/// positions, all from Philox keyed by (seed, "sample_patches") with
/// counter i.
SampleResult sample_patches(const std::vector<ManifestEntry>& manifest, const StageConfig& cfg,
                            std::uint64_t seed, std::size_t n);

std::string samples_to_jsonl(const std::vector<PatchSample>& samples);

}  // namespace dnb
