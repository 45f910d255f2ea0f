#include "dnbench/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dnbench/error.hpp"

namespace dnb {

namespace fs = std::filesystem;

std::string_view to_string(PsnrPooling pooling) noexcept {
  return pooling == PsnrPooling::joint ? "joint" : "per_channel_mean";
}

PsnrPooling parse_psnr_pooling(std::string_view text) {
  if (text == "joint") return PsnrPooling::joint;
  if (text == "per_channel_mean") return PsnrPooling::per_channel_mean;
  throw Error(Errc::config, "unknown psnr pooling '" + std::string(text) + "'");
}

namespace {

template <class T>
T number(std::string_view key, std::string_view value) {
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(Errc::config, std::string(key) + ": cannot parse '" + std::string(value) + "'");
  }
  return v;
}

bool boolean(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(Errc::config, std::string(key) + ": expected true or false");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  try {
    if (key == "clean_dir") {
      cfg.clean_dir = fs::path(value);
    } else if (key == "noisy_dir") {
      if (value.empty()) {
        cfg.noisy_dir.reset();
      } else {
        cfg.noisy_dir = fs::path(value);
      }
    } else if (key == "sigma") {
      cfg.noise.sigma_8bit = number<double>(key, value);
    } else if (key == "seed") {
      cfg.noise.seed = number<std::uint64_t>(key, value);
    } else if (key == "clip_noise") {
      cfg.noise.clip = parse_clip_mode(value);
    } else if (key == "backend") {
      // External settings given separately survive a later backend string.
      auto keep = cfg.backend.params;
      cfg.backend = parse_backend_spec(value);
      for (const auto& [k, v] : keep) {
        if (cfg.backend.kind == BackendKind::external) cfg.backend.params.try_emplace(k, v);
      }
    } else if (key == "external_cmd") {
      cfg.backend.params["cmd"] = std::string(value);
    } else if (key == "external_workdir") {
      cfg.backend.params["workdir"] = std::string(value);
    } else if (key == "external_timeout") {
      cfg.backend.params["timeout"] = std::string(value);
    } else if (key == "external_max_concurrent") {
      cfg.backend.params["max_concurrent"] = std::string(value);
    } else if (key == "ensemble") {
      cfg.ensemble = parse_ensemble_mode(value);
    } else if (key == "tiled") {
      cfg.tiled = boolean(key, value);
    } else if (key == "tile_window") {
      cfg.tile.window = number<int>(key, value);
    } else if (key == "tile_overlap") {
      cfg.tile.overlap = number<int>(key, value);
    } else if (key == "blend") {
      cfg.tile.blend = parse_blend(value);
    } else if (key == "as_8bit") {
      cfg.as_8bit = boolean(key, value);
    } else if (key == "psnr_pooling") {
      cfg.pooling = parse_psnr_pooling(value);
    } else if (key == "workers") {
      cfg.workers = number<int>(key, value);
    } else {
      throw Error(Errc::config, "unknown config key '" + std::string(key) + "'");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::config) throw;
    throw Error(Errc::config, std::string(key) + ": " + e.what());
  }
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  for (const auto& [k, v] : parse_key_values(text)) apply_setting(cfg, k, v);
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_unreadable, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

void RunConfig::validate() const {
  noise.validate();
  tile.validate();
  if (workers < 1) throw Error(Errc::config, "workers must be >= 1");
  if (clean_dir.empty()) throw Error(Errc::config, "clean_dir is not set");
  if (!fs::is_directory(clean_dir)) {
    throw Error(Errc::config, "clean_dir " + clean_dir.string() + " does not exist");
  }
  if (noisy_dir && !fs::is_directory(*noisy_dir)) {
    throw Error(Errc::config, "noisy_dir " + noisy_dir->string() + " does not exist");
  }
  // Surfaces malformed backend parameters before any image is processed.
  (void)make_denoiser(backend, noise);
}

KeyValues RunConfig::canonical() const {
  KeyValues kv;
  kv.emplace_back("noise_source", synthesize_noise() ? "synthetic" : "paired");
  if (synthesize_noise()) {
    kv.emplace_back("sigma", fmt_double(noise.sigma_8bit));
    kv.emplace_back("seed", std::to_string(noise.seed));
    kv.emplace_back("clip_noise", std::string(to_string(noise.clip)));
  }
  kv.emplace_back("backend", backend.canonical());
  kv.emplace_back("ensemble", std::string(to_string(ensemble)));
  kv.emplace_back("tiled", tiled ? "true" : "false");
  kv.emplace_back("tile_window", std::to_string(tile.window));
  kv.emplace_back("tile_overlap", std::to_string(tile.overlap));
  kv.emplace_back("blend", std::string(to_string(tile.blend)));
  kv.emplace_back("as_8bit", as_8bit ? "true" : "false");
  kv.emplace_back("psnr_pooling", std::string(to_string(pooling)));
  return kv;
}

std::string RunConfig::digest() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(render_key_values(canonical()))));
  return buf;
}

}  // namespace dnb
