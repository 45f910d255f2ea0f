#include "dnbench/report.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "dnbench/error.hpp"

namespace dnb {

using json = nlohmann::json;

std::size_t AblationReport::failures() const noexcept {
  std::size_t n = 0;
  for (const auto& r : records) n += r.ok() ? 0 : 1;
  return n;
}

const VariantSummary* AblationReport::find_variant(std::string_view name) const noexcept {
  for (const auto& v : variants) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::vector<VariantSummary> summarize(const std::vector<EvalRecord>& records,
                                      const std::vector<std::string>& variant_order) {
  std::vector<VariantSummary> out;
  for (const std::string& name : variant_order) {
    VariantSummary s;
    s.name = name;
    double psnr = 0.0, ssim = 0.0, wall = 0.0, mem = 0.0;
    for (const EvalRecord& r : records) {
      if (r.variant != name) continue;
      if (!r.ok()) {
        ++s.n_failed;
        continue;
      }
      ++s.n_images;
      psnr += r.psnr_db;
      ssim += r.ssim;
      wall += r.wall_ms;
      mem = std::max(mem, r.peak_mem_mb);
    }
    if (s.n_images > 0) {
      const double n = static_cast<double>(s.n_images);
      s.mean_psnr_db = psnr / n;
      s.mean_ssim = ssim / n;
      s.mean_wall_ms = wall / n;
      s.max_peak_mem_mb = mem;
    }
    out.push_back(std::move(s));
  }
  return out;
}

DeltaRow make_delta(std::string label, const VariantSummary& from, const VariantSummary& to) {
  DeltaRow d;
  d.label = std::move(label);
  d.from = from.name;
  d.to = to.name;
  if (from.mean_psnr_db && to.mean_psnr_db) d.d_psnr_db = *to.mean_psnr_db - *from.mean_psnr_db;
  if (from.mean_ssim && to.mean_ssim) d.d_ssim = *to.mean_ssim - *from.mean_ssim;
  return d;
}

std::string_view to_string(ReportFormat fmt) noexcept {
  switch (fmt) {
    case ReportFormat::json: return "json";
    case ReportFormat::csv: return "csv";
    case ReportFormat::markdown: return "markdown";
  }
  return "?";
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  if (text == "markdown" || text == "md") return ReportFormat::markdown;
  throw Error(Errc::invalid_argument, "unknown report format '" + std::string(text) + "'");
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  // "-0.0000" -> "0.0000"
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string format_signed(double v, int decimals) {
  std::string s = format_fixed(v, decimals);
  return s.front() == '-' ? s : "+" + s;
}

namespace {

// Volatile metadata keys carry this prefix and are dropped in canonical form.
constexpr std::string_view kVolatilePrefix = "run.";

double round4(double v) { return std::round(v * 1e4) / 1e4; }

json opt_number(const std::optional<double>& v, bool rounded) {
  if (!v) return nullptr;
  return rounded ? round4(*v) : *v;
}

std::optional<double> read_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_json(const AblationReport& r, const RenderOptions& opt) {
  json j;
  j["schema"] = "dnbench.report/1";
  j["config_digest"] = r.config_digest;
  json meta = json::object();
  for (const auto& [k, v] : r.metadata) {
    if (opt.canonical && k.starts_with(kVolatilePrefix)) continue;
    meta[k] = v;
  }
  j["metadata"] = meta;

  json variants = json::array();
  for (const VariantSummary& v : r.variants) {
    json o;
    o["name"] = v.name;
    o["n_images"] = v.n_images;
    o["n_failed"] = v.n_failed;
    o["psnr_db"] = opt_number(v.mean_psnr_db, true);
    o["psnr_db_raw"] = opt_number(v.mean_psnr_db, false);
    o["ssim"] = opt_number(v.mean_ssim, true);
    o["ssim_raw"] = opt_number(v.mean_ssim, false);
    if (!opt.canonical) {
      o["wall_ms"] = opt_number(v.mean_wall_ms, true);
      o["wall_ms_raw"] = opt_number(v.mean_wall_ms, false);
      o["peak_mem_mb"] = opt_number(v.max_peak_mem_mb, true);
      o["peak_mem_mb_raw"] = opt_number(v.max_peak_mem_mb, false);
    }
    variants.push_back(std::move(o));
  }
  j["variants"] = variants;

  json deltas = json::array();
  for (const DeltaRow& d : r.deltas) {
    json o;
    o["label"] = d.label;
    o["from"] = d.from;
    o["to"] = d.to;
    o["d_psnr_db"] = opt_number(d.d_psnr_db, true);
    o["d_psnr_db_raw"] = opt_number(d.d_psnr_db, false);
    o["d_ssim"] = opt_number(d.d_ssim, true);
    o["d_ssim_raw"] = opt_number(d.d_ssim, false);
    deltas.push_back(std::move(o));
  }
  j["deltas"] = deltas;

  json records = json::array();
  for (const EvalRecord& e : r.records) {
    json o;
    o["variant"] = e.variant;
    o["image_id"] = e.image_id;
    o["psnr_db"] = round4(e.psnr_db);
    o["psnr_db_raw"] = e.psnr_db;
    o["ssim"] = round4(e.ssim);
    o["ssim_raw"] = e.ssim;
    if (!opt.canonical) {
      o["wall_ms"] = round4(e.wall_ms);
      o["wall_ms_raw"] = e.wall_ms;
      o["peak_mem_mb"] = round4(e.peak_mem_mb);
      o["peak_mem_mb_raw"] = e.peak_mem_mb;
    }
    o["backend"] = e.backend;
    o["ensemble"] = e.ensemble;
    o["tile"] = e.tile;
    o["noise_digest"] = e.noise_digest;
    o["noisy_digest"] = e.noisy_digest;
    o["source_bit_depth"] = e.source_bit_depth;
    o["error"] = e.error.empty() ? json(nullptr) : json(e.error);
    records.push_back(std::move(o));
  }
  j["records"] = records;
  return j.dump(2) + "\n";
}

std::string render_csv(const AblationReport& r, const RenderOptions& opt) {
  std::string out =
      "variant,image_id,psnr_db,ssim,wall_ms,peak_mem_mb,backend,ensemble,tile,noise_digest,"
      "noisy_digest,source_bit_depth,error\n";
  for (const EvalRecord& e : r.records) {
    out += csv_field(e.variant) + "," + csv_field(e.image_id) + "," + full(e.psnr_db) + "," +
           full(e.ssim) + "," + (opt.canonical ? "" : full(e.wall_ms)) + "," +
           (opt.canonical ? "" : full(e.peak_mem_mb)) + "," + csv_field(e.backend) + "," +
           csv_field(e.ensemble) + "," + csv_field(e.tile) + "," + csv_field(e.noise_digest) +
           "," + csv_field(e.noisy_digest) + "," + std::to_string(e.source_bit_depth) + "," +
           csv_field(e.error) + "\n";
  }
  return out;
}

std::string cell(const std::optional<double>& v, int decimals) {
  return v ? format_fixed(*v, decimals) : "n/a";
}

std::string signed_cell(const std::optional<double>& v, int decimals) {
  return v ? format_signed(*v, decimals) : "n/a";
}

std::string render_markdown(const AblationReport& r, const RenderOptions& opt) {
  std::string out = "| Variant | PSNR | SSIM | Time/ms | Mem/MB | Images |\n";
  out += "|---|---|---|---|---|---|\n";
  for (const VariantSummary& v : r.variants) {
    out += "| " + v.name + " | " + cell(v.mean_psnr_db, 4) + " | " + cell(v.mean_ssim, 4) + " | " +
           (opt.canonical ? "-" : cell(v.mean_wall_ms, 2)) + " | " +
           (opt.canonical ? "-" : cell(v.max_peak_mem_mb, 0)) + " | " +
           std::to_string(v.n_images) + " |\n";
  }
  if (!r.deltas.empty()) {
    out += "\n| Delta | From | To | dPSNR/dB | dSSIM |\n";
    out += "|---|---|---|---|---|\n";
    for (const DeltaRow& d : r.deltas) {
      out += "| " + d.label + " | " + d.from + " | " + d.to + " | " + signed_cell(d.d_psnr_db, 4) +
             " | " + signed_cell(d.d_ssim, 4) + " |\n";
    }
  }
  return out;
}

}  // namespace

std::string render_report(const AblationReport& report, ReportFormat fmt, RenderOptions options) {
  switch (fmt) {
    case ReportFormat::json: return render_json(report, options);
    case ReportFormat::csv: return render_csv(report, options);
    case ReportFormat::markdown: return render_markdown(report, options);
  }
  return {};
}

AblationReport report_from_json(std::string_view text) {
  AblationReport r;
  try {
    const json j = json::parse(text);
    r.config_digest = j.value("config_digest", std::string{});
    if (j.contains("metadata")) {
      for (const auto& [k, v] : j.at("metadata").items()) r.metadata[k] = v.get<std::string>();
    }
    for (const json& o : j.value("variants", json::array())) {
      VariantSummary v;
      v.name = o.at("name").get<std::string>();
      v.n_images = o.value("n_images", std::size_t{0});
      v.n_failed = o.value("n_failed", std::size_t{0});
      v.mean_psnr_db = read_opt(o, "psnr_db_raw");
      v.mean_ssim = read_opt(o, "ssim_raw");
      v.mean_wall_ms = read_opt(o, "wall_ms_raw");
      v.max_peak_mem_mb = read_opt(o, "peak_mem_mb_raw");
      r.variants.push_back(std::move(v));
    }
    for (const json& o : j.value("deltas", json::array())) {
      DeltaRow d;
      d.label = o.at("label").get<std::string>();
      d.from = o.value("from", std::string{});
      d.to = o.value("to", std::string{});
      d.d_psnr_db = read_opt(o, "d_psnr_db_raw");
      d.d_ssim = read_opt(o, "d_ssim_raw");
      r.deltas.push_back(std::move(d));
    }
    for (const json& o : j.value("records", json::array())) {
      EvalRecord e;
      e.variant = o.at("variant").get<std::string>();
      e.image_id = o.at("image_id").get<std::string>();
      e.psnr_db = o.at("psnr_db_raw").get<double>();
      e.ssim = o.at("ssim_raw").get<double>();
      e.wall_ms = o.value("wall_ms_raw", 0.0);
      e.peak_mem_mb = o.value("peak_mem_mb_raw", 0.0);
      e.backend = o.value("backend", std::string{});
      e.ensemble = o.value("ensemble", std::string{});
      e.tile = o.value("tile", std::string{});
      e.noise_digest = o.value("noise_digest", std::string{});
      e.noisy_digest = o.value("noisy_digest", std::string{});
      e.source_bit_depth = o.value("source_bit_depth", 0);
      if (o.contains("error") && !o.at("error").is_null()) e.error = o.at("error").get<std::string>();
      r.records.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::config, std::string("report json: ") + e.what());
  }
  return r;
}

namespace {

std::set<std::string> ok_ids(const AblationReport& r, const std::string& variant) {
  std::set<std::string> ids;
  for (const EvalRecord& e : r.records) {
    if (e.variant == variant && e.ok()) ids.insert(e.image_id);
  }
  return ids;
}

const EvalRecord* find_record(const AblationReport& r, const std::string& variant,
                              const std::string& id) {
  for (const EvalRecord& e : r.records) {
    if (e.variant == variant && e.image_id == id && e.ok()) return &e;
  }
  return nullptr;
}

std::optional<double> diff(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return *b - *a;
}

}  // namespace

CompareTable compare_runs(const AblationReport& base, const AblationReport& cand) {
  std::vector<std::pair<const VariantSummary*, const VariantSummary*>> pairs;
  if (base.variants.size() == 1 && cand.variants.size() == 1) {
    pairs.emplace_back(&base.variants[0], &cand.variants[0]);
  } else {
    if (base.variants.size() != cand.variants.size()) {
      throw Error(Errc::image_set_mismatch, "reports have different variant sets");
    }
    for (const VariantSummary& v : base.variants) {
      const VariantSummary* other = cand.find_variant(v.name);
      if (!other) throw Error(Errc::image_set_mismatch, "variant '" + v.name + "' missing");
      pairs.emplace_back(&v, other);
    }
  }

  CompareTable table;
  for (const auto& [b, c] : pairs) {
    const auto ids = ok_ids(base, b->name);
    if (ids != ok_ids(cand, c->name)) {
      throw Error(Errc::image_set_mismatch,
                  "image sets differ for variant '" + b->name + "'; refusing to intersect");
    }
    const std::string label = b->name == c->name ? b->name : b->name + " -> " + c->name;
    table.variants.push_back(CompareRow{label, b->mean_psnr_db, c->mean_psnr_db,
                                        diff(b->mean_psnr_db, c->mean_psnr_db), b->mean_ssim,
                                        c->mean_ssim, diff(b->mean_ssim, c->mean_ssim)});
    for (const std::string& id : ids) {
      const EvalRecord* rb = find_record(base, b->name, id);
      const EvalRecord* rc = find_record(cand, c->name, id);
      table.images.push_back({label, id, rc->psnr_db - rb->psnr_db, rc->ssim - rb->ssim});
    }
  }
  return table;
}

std::string render_compare(const CompareTable& t, ReportFormat fmt) {
  switch (fmt) {
    case ReportFormat::json: {
      json j;
      json rows = json::array();
      for (const CompareRow& r : t.variants) {
        json o;
        o["variant"] = r.variant;
        o["base_psnr_db"] = opt_number(r.base_psnr_db, true);
        o["cand_psnr_db"] = opt_number(r.cand_psnr_db, true);
        o["d_psnr_db"] = opt_number(r.d_psnr_db, true);
        o["d_psnr_db_raw"] = opt_number(r.d_psnr_db, false);
        o["base_ssim"] = opt_number(r.base_ssim, true);
        o["cand_ssim"] = opt_number(r.cand_ssim, true);
        o["d_ssim"] = opt_number(r.d_ssim, true);
        o["d_ssim_raw"] = opt_number(r.d_ssim, false);
        rows.push_back(std::move(o));
      }
      j["variants"] = rows;
      json images = json::array();
      for (const CompareImageRow& r : t.images) {
        images.push_back({{"variant", r.variant},
                          {"image_id", r.image_id},
                          {"d_psnr_db", r.d_psnr_db},
                          {"d_ssim", r.d_ssim}});
      }
      j["images"] = images;
      return j.dump(2) + "\n";
    }
    case ReportFormat::csv: {
      std::string out = "variant,image_id,d_psnr_db,d_ssim\n";
      for (const CompareRow& r : t.variants) {
        out += csv_field(r.variant) + ",*," + (r.d_psnr_db ? full(*r.d_psnr_db) : "") + "," +
               (r.d_ssim ? full(*r.d_ssim) : "") + "\n";
      }
      for (const CompareImageRow& r : t.images) {
        out += csv_field(r.variant) + "," + csv_field(r.image_id) + "," + full(r.d_psnr_db) + "," +
               full(r.d_ssim) + "\n";
      }
      return out;
    }
    case ReportFormat::markdown: {
      std::string out =
          "| Variant | Base PSNR | Candidate PSNR | dPSNR/dB | Base SSIM | Candidate SSIM | dSSIM |\n"
          "|---|---|---|---|---|---|---|\n";
      for (const CompareRow& r : t.variants) {
        out += "| " + r.variant + " | " + cell(r.base_psnr_db, 4) + " | " + cell(r.cand_psnr_db, 4) +
               " | " + signed_cell(r.d_psnr_db, 4) + " | " + cell(r.base_ssim, 4) + " | " +
               cell(r.cand_ssim, 4) + " | " + signed_cell(r.d_ssim, 4) + " |\n";
      }
      return out;
    }
  }
  return {};
}

}  // namespace dnb
