#include "dnbench/backend.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <set>

#include "dnbench/dct_denoise.hpp"
#include "dnbench/error.hpp"
#include "dnbench/external.hpp"
#include "dnbench/filters.hpp"
#include "dnbench/nlm.hpp"

namespace dnb {

std::string_view to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::identity: return "identity";
    case BackendKind::gaussian_blur: return "gaussian_blur";
    case BackendKind::hbox_blur: return "hbox_blur";
    case BackendKind::nlm: return "nlm";
    case BackendKind::dct_threshold: return "dct_threshold";
    case BackendKind::external: return "external";
  }
  return "?";
}

BackendKind parse_backend_kind(std::string_view text) {
  for (BackendKind k : {BackendKind::identity, BackendKind::gaussian_blur, BackendKind::hbox_blur,
                        BackendKind::nlm, BackendKind::dct_threshold, BackendKind::external}) {
    if (to_string(k) == text) return k;
  }
  throw Error(Errc::invalid_argument, "unknown backend '" + std::string(text) + "'");
}

std::string BackendSpec::canonical() const {
  std::string out(to_string(kind));
  char sep = ':';
  for (const auto& [k, v] : params) {
    out += sep;
    out += k + "=" + v;
    sep = ',';
  }
  return out;
}

BackendSpec parse_backend_spec(std::string_view text) {
  BackendSpec spec;
  const auto colon = text.find(':');
  spec.kind = parse_backend_kind(text.substr(0, colon));
  spec.name = std::string(to_string(spec.kind));
  if (colon == std::string_view::npos) return spec;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(Errc::invalid_argument, "backend parameter '" + std::string(item) +
                                              "' is not key=value");
    }
    spec.params[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return spec;
}

namespace {

class ParamReader {
 public:
  ParamReader(const BackendSpec& spec, std::set<std::string> allowed) : spec_(spec) {
    for (const auto& [k, v] : spec.params) {
      if (!allowed.contains(k)) {
        throw Error(Errc::invalid_argument, "backend " + std::string(to_string(spec.kind)) +
                                                " has no parameter '" + k + "'");
      }
    }
  }

  double number(const std::string& key, double fallback) const {
    const auto it = spec_.params.find(key);
    if (it == spec_.params.end()) return fallback;
    double v = 0.0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw Error(Errc::invalid_argument, "parameter " + key + "='" + s + "' is not a number");
    }
    return v;
  }

  int integer(const std::string& key, int fallback) const {
    const double v = number(key, fallback);
    if (v != std::floor(v)) throw Error(Errc::invalid_argument, "parameter " + key + " must be an integer");
    return static_cast<int>(v);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const auto it = spec_.params.find(key);
    return it == spec_.params.end() ? fallback : it->second;
  }

 private:
  const BackendSpec& spec_;
};

class FunctionDenoiser final : public Denoiser {
 public:
  FunctionDenoiser(std::string name, DenoiseFn fn) : Denoiser(std::move(name)), fn_(std::move(fn)) {}
  Image denoise(const Image& x) const override { return fn_(x); }

 private:
  DenoiseFn fn_;
};

class ExternalDenoiser final : public Denoiser {
 public:
  ExternalDenoiser(std::string name, ExternalParams params, bool deterministic)
      : Denoiser(std::move(name)),
        params_(std::move(params)),
        deterministic_(deterministic),
        limiter_(params_.max_concurrent) {}

  Image denoise(const Image& x) const override {
    ExternalResult r = limiter_.run(params_, x);
    total_ms_.fetch_add(r.subprocess_ms, std::memory_order_relaxed);
    return std::move(r.image);
  }
  bool deterministic() const noexcept override { return deterministic_; }
  double subprocess_ms() const noexcept override { return total_ms_.load(); }

 private:
  ExternalParams params_;
  bool deterministic_;
  mutable ProcessLimiter limiter_;
  mutable std::atomic<double> total_ms_{0.0};
};

}  // namespace

std::shared_ptr<const Denoiser> make_denoiser(const BackendSpec& spec, const NoiseSpec& noise) {
  const std::string name = spec.name.empty() ? std::string(to_string(spec.kind)) : spec.name;
  switch (spec.kind) {
    case BackendKind::identity: {
      ParamReader p(spec, {});
      return std::make_shared<FunctionDenoiser>(name, [](const Image& x) { return x; });
    }
    case BackendKind::gaussian_blur: {
      ParamReader p(spec, {"std"});
      const double stddev = p.number("std", 1.0);
      if (!(stddev >= 0.0)) throw Error(Errc::invalid_argument, "gaussian_blur std must be >= 0");
      return std::make_shared<FunctionDenoiser>(
          name, [stddev](const Image& x) { return gaussian_blur(x, stddev); });
    }
    case BackendKind::hbox_blur: {
      ParamReader p(spec, {"radius"});
      const int radius = p.integer("radius", 2);
      if (radius < 0) throw Error(Errc::invalid_argument, "hbox_blur radius must be >= 0");
      return std::make_shared<FunctionDenoiser>(
          name, [radius](const Image& x) { return hbox_blur(x, radius); });
    }
    case BackendKind::nlm: {
      ParamReader p(spec, {"patch", "search", "h", "sigma_n"});
      NlmParams np;
      np.patch = p.integer("patch", 7);
      np.search = p.integer("search", 21);
      np.sigma_n = p.number("sigma_n", noise.sigma());
      np.h = p.number("h", np.sigma_n > 0.0 ? 0.4 * np.sigma_n : NlmParams{}.h);
      np.validate();
      return std::make_shared<FunctionDenoiser>(
          name, [np](const Image& x) { return nlm_denoise(x, np); });
    }
    case BackendKind::dct_threshold: {
      ParamReader p(spec, {"block", "threshold"});
      DctParams dp;
      dp.block = p.integer("block", 8);
      dp.threshold = p.number("threshold", 3.0 * noise.sigma());
      dp.validate();
      return std::make_shared<FunctionDenoiser>(
          name, [dp](const Image& x) { return dct_threshold_denoise(x, dp); });
    }
    case BackendKind::external: {
      ParamReader p(spec, {"cmd", "workdir", "timeout", "max_concurrent", "deterministic"});
      ExternalParams ep;
      ep.command = p.text("cmd", "");
      ep.workdir = p.text("workdir", ep.workdir.string());
      ep.timeout_s = p.number("timeout", 600.0);
      ep.max_concurrent = p.integer("max_concurrent", 1);
      const std::string det = p.text("deterministic", "false");
      if (det != "true" && det != "false") {
        throw Error(Errc::invalid_argument, "external deterministic must be true or false");
      }
      ep.validate();
      return std::make_shared<ExternalDenoiser>(name, std::move(ep), det == "true");
    }
  }
  throw Error(Errc::invalid_argument, "unhandled backend kind");
}

Image denoise(const Denoiser& backend, const Image& x) {
  if (x.channels() != 3) {
    throw Error(Errc::invalid_argument, "denoise expects a 3-channel image, got " +
                                            std::to_string(x.channels()));
  }
  Image y = backend.denoise(x);
  if (!same_shape(x, y)) {
    throw Error(Errc::shape_mismatch, "backend " + backend.name() + " changed the image shape");
  }
  return y;
}

DenoiseFn as_function(std::shared_ptr<const Denoiser> backend) {
  return [b = std::move(backend)](const Image& x) { return denoise(*b, x); };
}

}  // namespace dnb
