#pragma once

// Reports built from published aggregate numbers: one record per variant,
// so each variant mean equals the stored value.

#include <string>
#include <vector>

#include "dnbench/eval.hpp"
#include "dnbench/report.hpp"

namespace dnb::test {

struct FixtureRow {
  std::string variant;
  double psnr_db;
  double ssim;
  double wall_ms;
  double peak_mem_mb;
};

inline AblationReport report_from_rows(const std::vector<FixtureRow>& rows) {
  AblationReport r;
  r.config_digest = "fixture";
  std::vector<std::string> order;
  for (const FixtureRow& row : rows) {
    EvalRecord e;
    e.variant = row.variant;
    e.image_id = "validation_mean";
    e.psnr_db = row.psnr_db;
    e.ssim = row.ssim;
    e.wall_ms = row.wall_ms;
    e.peak_mem_mb = row.peak_mem_mb;
    e.backend = "external";
    r.records.push_back(e);
    order.push_back(row.variant);
  }
  r.variants = summarize(r.records, order);
  return r;
}

/// The four-row inference ablation table.
inline AblationReport table2_report() {
  AblationReport r = report_from_rows({
      {"Direct, 1-pass", 30.7349, 0.8603, 1063.01, 36089},
      {"Direct, x8", 30.7622, 0.8607, 8759.55, 36856},
      {"Wrapped, 1-pass", 30.7349, 0.8603, 1053.60, 36190},
      {"Wrapped, x8", 30.7622, 0.8607, 8815.73, 36956},
  });
  r.deltas = ablation_deltas(r.variants);
  return r;
}

/// Final checkpoint vs the public baseline; the baseline PSNRs are the final
/// numbers minus the reported margins (3.3520 single pass, 3.3662 with x8).
inline AblationReport final_model_report() {
  return report_from_rows({{"Direct, 1-pass", 30.7349, 0.8603, 0, 0},
                           {"Direct, x8", 30.7622, 0.8607, 0, 0}});
}

inline AblationReport baseline_report() {
  return report_from_rows({{"Direct, 1-pass", 30.7349 - 3.3520, 0.8603 - 0.0737, 0, 0},
                           {"Direct, x8", 30.7622 - 3.3662, 0.8607 - 0.0737, 0, 0}});
}

}  // namespace dnb::test
