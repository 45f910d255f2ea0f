#include "dnbench/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>

#include <omp.h>

#include "dnbench/error.hpp"
#include "dnbench/image_io.hpp"
#include "dnbench/metrics.hpp"

namespace dnb {

namespace fs = std::filesystem;

std::string variant_name(bool tiled, EnsembleMode ensemble) {
  std::string name = tiled ? "Wrapped, " : "Direct, ";
  switch (ensemble) {
    case EnsembleMode::off: return name + "1-pass";
    case EnsembleMode::flips4: return name + "x4";
    case EnsembleMode::full8: return name + "x8";
  }
  return name;
}

Variant variant_from_config(const RunConfig& cfg) {
  return {variant_name(cfg.tiled, cfg.ensemble), cfg.tiled, cfg.ensemble};
}

std::vector<Variant> ablation_variants(const RunConfig& cfg) {
  const EnsembleMode ens = cfg.ensemble == EnsembleMode::off ? EnsembleMode::full8 : cfg.ensemble;
  std::vector<Variant> out;
  for (bool tiled : {false, true}) {
    for (EnsembleMode e : {EnsembleMode::off, ens}) out.push_back({variant_name(tiled, e), tiled, e});
  }
  return out;
}

namespace {

std::vector<fs::path> list_pngs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string tile_label(const Variant& v, const TileSpec& t) {
  if (!v.tiled) return "direct";
  return "window=" + std::to_string(t.window) + ",overlap=" + std::to_string(t.overlap) +
         ",blend=" + std::string(to_string(t.blend));
}

DenoiseFn build_chain(const DenoiseFn& base, const Variant& v, const TileSpec& tile) {
  DenoiseFn f = base;
  if (v.tiled) f = [f, tile](const Image& x) { return tiled_denoise(f, x, tile); };
  if (v.ensemble != EnsembleMode::off) {
    const auto elems = ensemble_elements(v.ensemble);
    f = [f, elems](const Image& x) { return self_ensemble(f, x, elems); };
  }
  return f;
}

struct Prepared {
  Image clean{1, 1, 1};
  Image noisy{1, 1, 1};
  int bit_depth = 0;
};

Prepared prepare(const RunConfig& cfg, const fs::path& clean_path, const std::string& id) {
  Prepared p;
  PngInfo info;
  p.clean = crop_to_multiple(load_png(clean_path, &info), 8);
  p.bit_depth = info.bit_depth;
  if (cfg.synthesize_noise()) {
    p.noisy = add_gaussian_noise(p.clean, cfg.noise, derive_stream(cfg.noise.seed, id));
  } else {
    const fs::path noisy_path = *cfg.noisy_dir / clean_path.filename();
    p.noisy = crop_to_multiple(load_png(noisy_path), 8);
    if (!same_shape(p.noisy, p.clean)) {
      throw Error(Errc::shape_mismatch, "noisy image " + noisy_path.string() +
                                            " does not match its clean counterpart");
    }
  }
  return p;
}

std::string fmt_ms(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

AblationReport run_variants(const RunConfig& cfg, const std::vector<Variant>& variants) {
  cfg.validate();
  const auto files = list_pngs(cfg.clean_dir);
  if (files.empty()) {
    throw Error(Errc::empty_input, "no PNG images in " + cfg.clean_dir.string());
  }
  const auto backend = make_denoiser(cfg.backend, cfg.noise);
  const DenoiseFn base = as_function(backend);
  std::vector<DenoiseFn> chains;
  for (const Variant& v : variants) chains.push_back(build_chain(base, v, cfg.tile));

  const std::size_t n = files.size();
  const std::size_t nv = variants.size();
  // records[v * n + i]
  std::vector<EvalRecord> records(nv * n);
  const std::string noise_digest = cfg.synthesize_noise() ? cfg.noise.digest() : "paired";

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, cfg.workers))
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = files[i].stem().string();
    for (std::size_t v = 0; v < nv; ++v) {
      EvalRecord& r = records[v * n + i];
      r.variant = variants[v].name;
      r.image_id = id;
      r.backend = cfg.backend.canonical();
      r.ensemble = std::string(to_string(variants[v].ensemble));
      r.tile = tile_label(variants[v], cfg.tile);
      r.noise_digest = noise_digest;
    }
    std::optional<Prepared> prep;
    try {
      prep = prepare(cfg, files[i], id);
    } catch (const std::exception& e) {
      for (std::size_t v = 0; v < nv; ++v) records[v * n + i].error = e.what();
      continue;
    }
    const std::string noisy_digest = digest(prep->noisy);
    const Image reference = cfg.as_8bit ? quantize(prep->clean, 8) : prep->clean;
    for (std::size_t v = 0; v < nv; ++v) {
      EvalRecord& r = records[v * n + i];
      r.noisy_digest = noisy_digest;
      r.source_bit_depth = prep->bit_depth;
      try {
        auto m = measure([&] { return chains[v](prep->noisy); });
        Image restored = cfg.as_8bit ? quantize(m.result, 8) : std::move(m.result);
        r.wall_ms = m.measurement.wall_ms;
        r.peak_mem_mb = m.measurement.peak_mem_mb;
        r.psnr_db = psnr(restored, reference, 1.0, cfg.pooling);
        r.ssim = ssim(restored, reference);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  }

  AblationReport report;
  report.config_digest = cfg.digest();
  report.records = std::move(records);
  std::vector<std::string> order;
  for (const Variant& v : variants) order.push_back(v.name);
  report.variants = summarize(report.records, order);

  auto& meta = report.metadata;
  for (const auto& [k, v] : cfg.canonical()) meta["config." + k] = v;
  meta["protocol.preprocess"] = "crop top-left to a multiple of 8, samples in [0,1]";
  meta["protocol.timing"] = "wrapper-chain forward only; excludes image I/O and metrics";
  meta["protocol.memory"] =
      "process peak RSS in MB; GPU memory of external backends is not captured";
  meta["protocol.metrics"] = cfg.as_8bit ? "8-bit quantized output" : "float output";
  meta["protocol.ensemble_average"] = "float outputs averaged in double before any quantization";
  meta["run.workers"] = std::to_string(cfg.workers);
  if (cfg.backend.kind == BackendKind::external) {
    meta["run.external_subprocess_ms"] = fmt_ms(backend->subprocess_ms());
  }
  return report;
}

AblationReport run_eval(const RunConfig& cfg) {
  return run_variants(cfg, {variant_from_config(cfg)});
}

std::vector<DeltaRow> ablation_deltas(const std::vector<VariantSummary>& v) {
  if (v.size() != 4) throw Error(Errc::invalid_argument, "ablation deltas need four variants");
  return {make_delta("ensemble @ direct", v[0], v[1]), make_delta("ensemble @ wrapped", v[2], v[3]),
          make_delta("wrapper @ 1-pass", v[0], v[2]), make_delta("wrapper @ ensemble", v[1], v[3])};
}

AblationReport run_ablation_matrix(const RunConfig& cfg) {
  AblationReport report = run_variants(cfg, ablation_variants(cfg));
  report.deltas = ablation_deltas(report.variants);
  return report;
}

int exit_code(const AblationReport& report) noexcept {
  return report.failures() == 0 ? 0 : 2;
}

}  // namespace dnb
