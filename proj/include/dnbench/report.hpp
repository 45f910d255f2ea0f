#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dnb {

/// One image evaluated under one variant. Failed images carry `error` and
/// are excluded from aggregates.
struct EvalRecord {
  std::string variant;
  std::string image_id;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double wall_ms = 0.0;
  double peak_mem_mb = 0.0;
  std::string backend;
  std::string ensemble;
  std::string tile;
  std::string noise_digest;
  std::string noisy_digest;
  int source_bit_depth = 0;
  std::string error;

  bool ok() const noexcept { return error.empty(); }
  bool operator==(const EvalRecord&) const = default;
};

struct VariantSummary {
  std::string name;
  std::size_t n_images = 0;
  std::size_t n_failed = 0;
  std::optional<double> mean_psnr_db;
  std::optional<double> mean_ssim;
  std::optional<double> mean_wall_ms;
  std::optional<double> max_peak_mem_mb;

  bool operator==(const VariantSummary&) const = default;
};

/// to minus from, computed on the variant means.
struct DeltaRow {
  std::string label;
  std::string from;
  std::string to;
  std::optional<double> d_psnr_db;
  std::optional<double> d_ssim;

  bool operator==(const DeltaRow&) const = default;
};

struct AblationReport {
  std::string config_digest;
  std::map<std::string, std::string> metadata;
  std::vector<VariantSummary> variants;
  std::vector<DeltaRow> deltas;
  std::vector<EvalRecord> records;

  std::size_t failures() const noexcept;
  const VariantSummary* find_variant(std::string_view name) const noexcept;
  bool operator==(const AblationReport&) const = default;
};

/// Aggregates the records of each named variant (in the given order):
/// arithmetic means over successful records, max for peak memory, and
/// nullopt aggregates when a variant has no successful record.
std::vector<VariantSummary> summarize(const std::vector<EvalRecord>& records,
                                      const std::vector<std::string>& variant_order);

DeltaRow make_delta(std::string label, const VariantSummary& from, const VariantSummary& to);

enum class ReportFormat { json, csv, markdown };

std::string_view to_string(ReportFormat fmt) noexcept;
ReportFormat parse_report_format(std::string_view text);

struct RenderOptions {
  /// Drop run-to-run volatile fields (wall time, memory, volatile metadata)
  /// so deterministic runs render byte-identically.
  bool canonical = false;
};

/// json: stable key order; metric display fields rounded to 4 decimals next
/// to full-precision "_raw" fields. csv: one row per variant and image.
/// markdown: variant table with PSNR, SSIM, Time/ms and Mem/MB columns plus
/// the delta table.
std::string render_report(const AblationReport& report, ReportFormat fmt,
                          RenderOptions options = {});

/// Inverse of the json rendering (reads the "_raw" fields).
AblationReport report_from_json(std::string_view text);

struct CompareRow {
  std::string variant;
  std::optional<double> base_psnr_db;
  std::optional<double> cand_psnr_db;
  std::optional<double> d_psnr_db;
  std::optional<double> base_ssim;
  std::optional<double> cand_ssim;
  std::optional<double> d_ssim;
};

struct CompareImageRow {
  std::string variant;
  std::string image_id;
  double d_psnr_db = 0.0;
  double d_ssim = 0.0;
};

struct CompareTable {
  std::vector<CompareRow> variants;
  std::vector<CompareImageRow> images;
};

/// Candidate minus base, per variant and per image. Variants are matched by
/// name (two single-variant reports are paired directly). The sets of
/// variant names and of successful image ids must match exactly;
/// otherwise Errc::image_set_mismatch.
CompareTable compare_runs(const AblationReport& base, const AblationReport& candidate);

std::string render_compare(const CompareTable& table, ReportFormat fmt);

/// "+0.0273" style: fixed decimals, explicit sign, no negative zero.
std::string format_signed(double v, int decimals);
std::string format_fixed(double v, int decimals);

}  // namespace dnb
