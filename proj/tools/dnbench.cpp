#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dnbench/dataprep.hpp"
#include "dnbench/error.hpp"
#include "dnbench/eval.hpp"
#include "dnbench/image_io.hpp"
#include "dnbench/keyvalue.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dnb::Error(dnb::Errc::io_unreadable, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw dnb::Error(dnb::Errc::io_unwritable, "cannot write " + out);
  f << text;
}

// Run-config flags map onto config keys and are applied after the config
// file, so flags win.
struct RunFlags {
  std::string config;
  dnb::KeyValues overrides;
  std::string format = "json";
  std::string out;
  bool canonical = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key = value config file");
    value(app, "--clean", "clean_dir", "directory of clean PNGs");
    value(app, "--noisy", "noisy_dir", "paired noisy PNGs (same file names)");
    value(app, "--sigma", "sigma", "noise sigma on the 0-255 scale (default 50)");
    value(app, "--seed", "seed", "noise seed");
    value(app, "--clip-noise", "clip_noise", "none | clip01");
    value(app, "--backend", "backend", "kind[:k=v,...]");
    value(app, "--external-cmd", "external_cmd", "command with {in} and {out}");
    value(app, "--external-timeout", "external_timeout", "seconds");
    value(app, "--ensemble", "ensemble", "off | flips4 | full8");
    value(app, "--tile-window", "tile_window", "window side (implies --wrap)", true);
    value(app, "--tile-overlap", "tile_overlap", "tile overlap in pixels");
    value(app, "--blend", "blend", "uniform | hann");
    value(app, "--workers", "workers", "concurrent images");
    value(app, "--psnr-pooling", "psnr_pooling", "joint | per_channel_mean");
    app->add_flag_callback("--wrap", [this] { overrides.emplace_back("tiled", "true"); },
                           "enable the tiled inference wrapper");
    app->add_flag_callback("--as-8bit", [this] { overrides.emplace_back("as_8bit", "true"); },
                           "quantize output and reference to 8 bits before scoring");
    app->add_option("--format", format, "json | csv | markdown")->capture_default_str();
    app->add_option("--out", out, "output file (default stdout)");
    app->add_flag("--canonical", canonical, "omit timing, memory and volatile metadata");
  }

  void value(CLI::App* app, const std::string& flag, std::string key, const std::string& help,
             bool implies_wrap = false) {
    app->add_option_function<std::string>(
        flag,
        [this, key, implies_wrap](const std::string& v) {
          overrides.emplace_back(key, v);
          if (implies_wrap) overrides.emplace_back("tiled", "true");
        },
        help);
  }

  dnb::RunConfig resolve() const {
    dnb::RunConfig cfg = config.empty() ? dnb::RunConfig{} : dnb::load_run_config(config);
    for (const auto& [k, v] : overrides) dnb::apply_setting(cfg, k, v);
    return cfg;
  }
};

int finish_report(const dnb::AblationReport& report, const RunFlags& flags) {
  emit(dnb::render_report(report, dnb::parse_report_format(flags.format), {flags.canonical}),
       flags.out);
  if (report.failures() > 0) {
    std::fprintf(stderr, "%zu image evaluation(s) failed\n", report.failures());
    for (const auto& r : report.records) {
      if (!r.ok()) std::fprintf(stderr, "  %s / %s: %s\n", r.variant.c_str(), r.image_id.c_str(),
                                r.error.c_str());
    }
  }
  return dnb::exit_code(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian color denoising benchmark harness"};
  app.require_subcommand(1);

  RunFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "evaluate one variant over a directory");
  eval_flags.attach(eval);

  RunFlags ablate_flags;
  auto* ablate = app.add_subcommand("ablate", "direct/wrapped x 1-pass/ensemble matrix");
  ablate_flags.attach(ablate);

  std::string cmp_base, cmp_cand, cmp_format = "markdown", cmp_out;
  auto* compare = app.add_subcommand("compare", "candidate minus base, per variant and image");
  compare->add_option("base", cmp_base, "base report (json)")->required();
  compare->add_option("candidate", cmp_cand, "candidate report (json)")->required();
  compare->add_option("--format", cmp_format, "json | csv | markdown")->capture_default_str();
  compare->add_option("--out", cmp_out, "output file (default stdout)");

  std::string prep_src, prep_dst, prep_manifest;
  int prep_target = 2048, prep_min = 256;
  auto* prep = app.add_subcommand("prep-subimages", "cut sources into ~2K sub-images");
  prep->add_option("--src", prep_src, "source PNG directory")->required();
  prep->add_option("--dst", prep_dst, "output directory")->required();
  prep->add_option("--target", prep_target, "target long side")->capture_default_str();
  prep->add_option("--min-side", prep_min, "discard tiles below this side")->capture_default_str();
  prep->add_option("--manifest", prep_manifest, "manifest path (default <dst>/manifest.jsonl)");

  std::string smp_manifest, smp_stage = "I", smp_stage_cfg, smp_out;
  std::uint64_t smp_seed = 0;
  std::size_t smp_n = 0;
  auto* sample = app.add_subcommand("sample-patches", "draw training patches from a manifest");
  sample->add_option("--manifest", smp_manifest, "sub-image manifest (jsonl)")->required();
  sample->add_option("--stage", smp_stage, "I | II (default schedules)")->capture_default_str();
  sample->add_option("--stage-config", smp_stage_cfg, "stage config file overriding --stage");
  sample->add_option("--seed", smp_seed, "sampling seed")->capture_default_str();
  sample->add_option("-n,--count", smp_n, "number of patches")->required();
  sample->add_option("--out", smp_out, "output file (default stdout)");

  std::string noise_clean, noise_out, noise_clip = "none";
  double noise_sigma = 50.0;
  std::uint64_t noise_seed = 0;
  int noise_depth = 8;
  auto* noise = app.add_subcommand("noise", "write noisy PNGs for a clean directory");
  noise->add_option("--clean", noise_clean, "directory of clean PNGs")->required();
  noise->add_option("--out", noise_out, "output directory")->required();
  noise->add_option("--sigma", noise_sigma, "sigma on the 0-255 scale")->capture_default_str();
  noise->add_option("--seed", noise_seed, "noise seed")->capture_default_str();
  noise->add_option("--clip-noise", noise_clip, "none | clip01")->capture_default_str();
  noise->add_option("--depth", noise_depth, "output bit depth (8 | 16)")->capture_default_str();

  auto* stages = app.add_subcommand("stages", "print the default two-stage data recipe");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*eval) return finish_report(dnb::run_eval(eval_flags.resolve()), eval_flags);
    if (*ablate) return finish_report(dnb::run_ablation_matrix(ablate_flags.resolve()), ablate_flags);

    if (*compare) {
      const auto table = dnb::compare_runs(dnb::report_from_json(read_file(cmp_base)),
                                           dnb::report_from_json(read_file(cmp_cand)));
      emit(dnb::render_compare(table, dnb::parse_report_format(cmp_format)), cmp_out);
      return 0;
    }

    if (*prep) {
      const auto result = dnb::make_subimages(prep_src, prep_dst, prep_target, prep_min);
      const std::string manifest =
          prep_manifest.empty() ? (fs::path(prep_dst) / "manifest.jsonl").string() : prep_manifest;
      emit(dnb::manifest_to_jsonl(result.entries), manifest);
      emit(dnb::summary_to_json(result.summary), "-");
      return result.summary.sources_failed == 0 ? 0 : 2;
    }

    if (*sample) {
      dnb::StageConfig cfg;
      if (!smp_stage_cfg.empty()) {
        cfg = dnb::parse_stage_config(read_file(smp_stage_cfg));
      } else {
        const auto [one, two] = dnb::default_stage_configs();
        cfg = dnb::parse_stage(smp_stage) == dnb::Stage::I ? one : two;
      }
      const auto manifest = dnb::manifest_from_jsonl(read_file(smp_manifest));
      const auto result = dnb::sample_patches(manifest, cfg, smp_seed, smp_n);
      emit(dnb::samples_to_jsonl(result.samples), smp_out);
      if (result.filtered > 0) {
        std::fprintf(stderr, "%zu tile(s) smaller than the largest patch were skipped\n",
                     result.filtered);
      }
      return 0;
    }

    if (*noise) {
      dnb::NoiseSpec spec;
      spec.sigma_8bit = noise_sigma;
      spec.seed = noise_seed;
      spec.clip = dnb::parse_clip_mode(noise_clip);
      spec.validate();
      fs::create_directories(noise_out);
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(noise_clean)) {
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw dnb::Error(dnb::Errc::empty_input, "no PNG images in " + noise_clean);
      for (const auto& f : files) {
        const dnb::Image clean = dnb::crop_to_multiple(dnb::load_png(f), 8);
        const auto stream = dnb::derive_stream(spec.seed, f.stem().string());
        dnb::save_png(dnb::add_gaussian_noise(clean, spec, stream), fs::path(noise_out) / f.filename(),
                      noise_depth);
      }
      return 0;
    }

    if (*stages) {
      const auto [one, two] = dnb::default_stage_configs();
      std::printf("# stage I\n%s\n# stage II\n%s", dnb::serialize(one).c_str(),
                  dnb::serialize(two).c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dnbench: %s\n", e.what());
    return 1;
  }
  return 1;
}
