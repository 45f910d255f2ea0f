#include "dnbench/dataprep.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "dnbench/error.hpp"
#include "dnbench/image_io.hpp"
#include "dnbench/keyvalue.hpp"
#include "dnbench/noise.hpp"

namespace dnb {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(Stage stage) noexcept { return stage == Stage::I ? "I" : "II"; }

Stage parse_stage(std::string_view text) {
  if (text == "I" || text == "1") return Stage::I;
  if (text == "II" || text == "2") return Stage::II;
  throw Error(Errc::invalid_argument, "unknown stage '" + std::string(text) + "'");
}

void StageConfig::validate() const {
  if (patch_schedule.empty()) throw Error(Errc::config, "patch schedule is empty");
  int prev = 0;
  for (const PatchPhase& p : patch_schedule) {
    if (p.patch_px <= 0 || p.patch_px % 8 != 0) {
      throw Error(Errc::config, "patch size " + std::to_string(p.patch_px) +
                                    " is not a positive multiple of 8");
    }
    if (p.patch_px <= prev) throw Error(Errc::config, "patch sizes must strictly increase");
    if (p.batch < 1) throw Error(Errc::config, "batch size must be >= 1");
    prev = p.patch_px;
  }
  if (iterations < 1) throw Error(Errc::config, "iterations must be >= 1");
}

int StageConfig::max_patch() const {
  int m = 0;
  for (const PatchPhase& p : patch_schedule) m = std::max(m, p.patch_px);
  return m;
}

std::pair<StageConfig, StageConfig> default_stage_configs() {
  StageConfig one;
  one.stage = Stage::I;
  one.sources = {"DIV2K", "Flickr2K", "OST", "LSDIR"};
  one.patch_schedule = {{256, 4}, {448, 2}, {768, 1}};
  one.iterations = 300000;
  one.initial_lr = 1e-4;

  StageConfig two;
  two.stage = Stage::II;
  two.sources = one.sources;
  for (const char* s : {"LIU4K-v2", "NKUSR8K", "DIV8K"}) two.sources.emplace_back(s);
  two.patch_schedule = {{768, 4}};
  two.iterations = 300000;
  two.initial_lr = 1e-5;
  return {one, two};
}

std::string serialize(const StageConfig& cfg) {
  std::string sources;
  for (std::size_t i = 0; i < cfg.sources.size(); ++i) {
    sources += (i ? "," : "") + cfg.sources[i];
  }
  std::string schedule;
  for (std::size_t i = 0; i < cfg.patch_schedule.size(); ++i) {
    schedule += (i ? "," : "") + std::to_string(cfg.patch_schedule[i].patch_px) + "x" +
                std::to_string(cfg.patch_schedule[i].batch);
  }
  char lr[32];
  const auto lr_end = std::to_chars(lr, lr + sizeof lr, cfg.initial_lr).ptr;
  return render_key_values({{"stage", std::string(to_string(cfg.stage))},
                            {"sources", sources},
                            {"patch_schedule", schedule},
                            {"iterations", std::to_string(cfg.iterations)},
                            {"initial_lr", std::string(lr, lr_end)},
                            {"optimizer", cfg.optimizer},
                            {"loss", cfg.loss}});
}

namespace {

template <class T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::config, std::string(what) + ": cannot parse '" + s + "'");
  }
  return v;
}

}  // namespace

StageConfig parse_stage_config(std::string_view text) {
  StageConfig cfg;
  cfg.optimizer.clear();
  cfg.loss.clear();
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "stage") {
      cfg.stage = parse_stage(value);
    } else if (key == "sources") {
      cfg.sources = split(value, ',');
    } else if (key == "patch_schedule") {
      cfg.patch_schedule.clear();
      for (const std::string& item : split(value, ',')) {
        const auto x = item.find('x');
        if (x == std::string::npos) throw Error(Errc::config, "schedule item '" + item + "' is not PxB");
        cfg.patch_schedule.push_back({parse_number<int>(item.substr(0, x), "patch"),
                                      parse_number<int>(item.substr(x + 1), "batch")});
      }
    } else if (key == "iterations") {
      cfg.iterations = parse_number<long>(value, "iterations");
    } else if (key == "initial_lr") {
      cfg.initial_lr = parse_number<double>(value, "initial_lr");
    } else if (key == "optimizer") {
      cfg.optimizer = value;
    } else if (key == "loss") {
      cfg.loss = value;
    } else {
      throw Error(Errc::config, "unknown stage config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::vector<int> equal_split(int extent, int parts) {
  if (parts < 1 || extent < parts) throw Error(Errc::invalid_argument, "cannot split extent");
  std::vector<int> sizes(parts, extent / parts);
  for (int i = 0; i < extent % parts; ++i) ++sizes[i];
  return sizes;
}

std::vector<GridTile> subimage_grid(int width, int height, int target_long_side) {
  if (target_long_side < 1) throw Error(Errc::invalid_argument, "target long side must be >= 1");
  const int cols = (width + target_long_side - 1) / target_long_side;
  const int rows = (height + target_long_side - 1) / target_long_side;
  const auto ws = equal_split(width, cols);
  const auto hs = equal_split(height, rows);
  std::vector<GridTile> tiles;
  int y = 0;
  for (int r = 0; r < rows; ++r) {
    int x = 0;
    for (int c = 0; c < cols; ++c) {
      tiles.push_back({r, c, Rect{x, y, ws[c], hs[r]}});
      x += ws[c];
    }
    y += hs[r];
  }
  return tiles;
}

SubimageResult make_subimages(const fs::path& src_dir, const fs::path& dst_dir,
                              int target_long_side, int min_side) {
  if (!fs::is_directory(src_dir)) {
    throw Error(Errc::io_unreadable, src_dir.string() + " is not a directory");
  }
  std::vector<fs::path> sources;
  for (const auto& e : fs::directory_iterator(src_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png") sources.push_back(e.path());
  }
  std::sort(sources.begin(), sources.end());
  fs::create_directories(dst_dir);

  const int n = static_cast<int>(sources.size());
  std::vector<std::vector<ManifestEntry>> per_source(n);

#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    const fs::path& src = sources[i];
    auto& entries = per_source[i];
    try {
      PngInfo info;
      const Image img = load_png(src, &info);
      for (const GridTile& t : subimage_grid(img.width(), img.height(), target_long_side)) {
        ManifestEntry e;
        e.source = src.string();
        e.rect = t.rect;
        if (t.rect.w < min_side || t.rect.h < min_side) {
          e.discarded = true;
        } else {
          const fs::path out = dst_dir / (src.stem().string() + "_r" + std::to_string(t.row) +
                                          "c" + std::to_string(t.col) + ".png");
          save_png(crop(img, t.rect), out, info.bit_depth);
          e.out = out.string();
        }
        entries.push_back(std::move(e));
      }
    } catch (const std::exception& ex) {
      entries.clear();
      ManifestEntry e;
      e.source = src.string();
      e.error = ex.what();
      entries.push_back(std::move(e));
    }
  }

  SubimageResult result;
  result.summary.sources = sources.size();
  for (auto& entries : per_source) {
    for (auto& e : entries) {
      if (!e.error.empty()) {
        ++result.summary.sources_failed;
      } else if (e.discarded) {
        ++result.summary.tiles_discarded;
      } else {
        ++result.summary.tiles_emitted;
      }
      result.entries.push_back(std::move(e));
    }
  }
  return result;
}

std::string manifest_to_jsonl(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const ManifestEntry& e : entries) {
    json j = json::object();
    j["source"] = e.source;
    if (e.rect) {
      j["rect"] = {e.rect->x0, e.rect->y0, e.rect->w, e.rect->h};
    }
    j["out"] = e.out ? json(*e.out) : json(nullptr);
    if (e.discarded) j["discarded"] = true;
    if (!e.error.empty()) j["error"] = e.error;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<ManifestEntry> manifest_from_jsonl(std::string_view text) {
  std::vector<ManifestEntry> entries;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ManifestEntry e;
      e.source = j.at("source").get<std::string>();
      if (j.contains("rect")) {
        const auto& r = j.at("rect");
        e.rect = Rect{r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<int>(), r.at(3).get<int>()};
      }
      if (j.contains("out") && !j.at("out").is_null()) e.out = j.at("out").get<std::string>();
      e.discarded = j.value("discarded", false);
      e.error = j.value("error", std::string{});
      entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw Error(Errc::config, "manifest line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return entries;
}

std::string summary_to_json(const SubimageSummary& s) {
  json j;
  j["sources"] = s.sources;
  j["sources_failed"] = s.sources_failed;
  j["tiles_emitted"] = s.tiles_emitted;
  j["tiles_discarded"] = s.tiles_discarded;
  return j.dump(2) + "\n";
}

namespace {

__extension__ typedef unsigned __int128 u128;

std::uint64_t uniform_below(std::uint64_t r, std::uint64_t n) {
  return static_cast<std::uint64_t>((static_cast<u128>(r) * n) >> 64);
}

}  // namespace

SampleResult sample_patches(const std::vector<ManifestEntry>& manifest, const StageConfig& cfg,
                            std::uint64_t seed, std::size_t n) {
  cfg.validate();
  SampleResult result;
  const int largest = cfg.max_patch();
  std::vector<const ManifestEntry*> eligible;
  for (const ManifestEntry& e : manifest) {
    if (!e.out || !e.rect) continue;
    if (e.rect->w < largest || e.rect->h < largest) {
      ++result.filtered;
      continue;
    }
    eligible.push_back(&e);
  }
  if (eligible.empty()) {
    throw Error(Errc::empty_input, "no manifest tile is at least " + std::to_string(largest) +
                                       " px on both sides");
  }

  const PhiloxKey key{seed, fnv1a64("sample_patches")};
  const std::size_t phases = cfg.patch_schedule.size();
  result.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t phase = static_cast<std::size_t>((static_cast<u128>(i) * phases) / n);
    const int patch = cfg.patch_schedule[phase].patch_px;
    const PhiloxCounter r = philox4x64_10({static_cast<std::uint64_t>(i), 0, 0, 0}, key);
    const ManifestEntry& e = *eligible[uniform_below(r[0], eligible.size())];
    const int x0 = static_cast<int>(uniform_below(r[1], static_cast<std::uint64_t>(e.rect->w - patch + 1)));
    const int y0 = static_cast<int>(uniform_below(r[2], static_cast<std::uint64_t>(e.rect->h - patch + 1)));
    result.samples.push_back({*e.out, Rect{x0, y0, patch, patch}, cfg.stage, i});
  }
  return result;
}

std::string samples_to_jsonl(const std::vector<PatchSample>& samples) {
  std::string out;
  for (const PatchSample& s : samples) {
    json j = json::object();
    j["draw_index"] = s.draw_index;
    j["source"] = s.source_path;
    j["rect"] = {s.rect.x0, s.rect.y0, s.rect.w, s.rect.h};
    j["stage"] = std::string(to_string(s.stage));
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace dnb
