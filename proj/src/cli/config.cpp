#include "solitonforge/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "solitonforge/error.hpp"

namespace solitonforge::cli {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& detail) { throw Error("cli", Errc::ParseError, detail); }

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) parse_fail(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) parse_fail("unknown key '" + key + "' in " + where);
}

double get_number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) parse_fail(where + "." + key + ": expected a number");
  return v.get<double>();
}

long long get_integer(const json& obj, const char* key, const std::string& where, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) parse_fail(where + "." + key + ": expected an integer");
  return v.get<long long>();
}

std::string get_string(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) parse_fail(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

const json& get_array(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_array()) parse_fail(where + "." + key + ": expected an array");
  return v;
}

Format parse_format(const std::string& s, const std::string& where) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  parse_fail(where + ": format must be \"csv\" or \"json\"");
}

// 1-based line of a byte offset, for parser diagnostics.
std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

std::string format_name(Format f) { return f == Format::Csv ? "csv" : "json"; }

void revalidate(RunConfig& cfg) {
  try {
    cfg.spec = model::validate_spec(cfg.spec);
  } catch (const Error& e) {
    throw Error("cli", Errc::ValidationError, e.qualified_code() + ": " + e.detail());
  }
}

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(source + ": line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " + e.what());
  }
  reject_unknown(doc, "config",
                 {"mode", "factors", "gauge_C", "seed", "integration", "sectional_bounds", "output", "sweep", "oracle"});

  RunConfig cfg;
  auto& spec = cfg.spec;
  const std::string mode = get_string(doc, "mode", "config", "soliton");
  if (mode == "soliton")
    spec.mode = model::Mode::Soliton;
  else if (mode == "ricci-flat")
    spec.mode = model::Mode::RicciFlat;
  else
    parse_fail("config.mode: expected \"soliton\" or \"ricci-flat\"");

  if (!doc.contains("factors")) parse_fail("config.factors: required");
  const auto& factors = get_array(doc, "factors", "config");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const std::string where = "factors[" + std::to_string(i) + "]";
    reject_unknown(factors[i], where, {"dim", "lambda"});
    if (!factors[i].contains("dim")) parse_fail(where + ".dim: required");
    const auto dim = get_integer(factors[i], "dim", where, 0);
    double lambda;
    if (factors[i].contains("lambda")) {
      lambda = get_number(factors[i], "lambda", where, 0.0);
    } else if (dim >= 2) {
      lambda = static_cast<double>(dim - 1);  // round sphere normalisation
    } else {
      lambda = 0.0;  // no default for one-dimensional factors; validation reports it
    }
    spec.factors.push_back({static_cast<int>(dim), lambda});
  }
  spec.gauge_C = get_number(doc, "gauge_C", "config", -1.0);

  const std::size_t r = spec.factors.size();
  spec.seed_coeffs = model::default_seed_coeffs(r);
  if (spec.mode == model::Mode::RicciFlat && r > 0) spec.seed_coeffs[0] = 0.0;
  if (doc.contains("seed")) {
    const auto& seed = doc.at("seed");
    reject_unknown(seed, "seed", {"eps0", "eps", "order"});
    if (r > 0) spec.seed_coeffs[0] = get_number(seed, "eps0", "seed", spec.seed_coeffs[0]);
    if (seed.contains("eps")) {
      const auto& eps = get_array(seed, "eps", "seed");
      if (eps.size() + 1 != r)
        parse_fail("seed.eps: expected " + std::to_string(r > 0 ? r - 1 : 0) + " entries (factors 2..r)");
      for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!eps[k].is_number()) parse_fail("seed.eps[" + std::to_string(k) + "]: expected a number");
        spec.seed_coeffs[k + 1] = eps[k].get<double>();
      }
    }
    spec.seed_order = static_cast<int>(get_integer(seed, "order", "seed", spec.seed_order));
  }

  if (doc.contains("integration")) {
    const auto& in = doc.at("integration");
    reject_unknown(in, "integration",
                   {"s_start", "s_max", "initial_step", "abs_tol", "rel_tol", "max_steps", "origin_tol"});
    spec.s_start = get_number(in, "s_start", "integration", spec.s_start);
    spec.s_max = get_number(in, "s_max", "integration", spec.s_max);
    spec.step.initial_step = get_number(in, "initial_step", "integration", spec.step.initial_step);
    spec.step.abs_tol = get_number(in, "abs_tol", "integration", spec.step.abs_tol);
    spec.step.rel_tol = get_number(in, "rel_tol", "integration", spec.step.rel_tol);
    const auto steps = get_integer(in, "max_steps", "integration", static_cast<long long>(spec.step.max_steps));
    if (steps <= 0) parse_fail("integration.max_steps: must be positive");
    spec.step.max_steps = static_cast<std::size_t>(steps);
    spec.origin_tol = get_number(in, "origin_tol", "integration", spec.origin_tol);
  }

  if (doc.contains("sectional_bounds")) {
    const auto& sb = get_array(doc, "sectional_bounds", "config");
    for (std::size_t i = 0; i < sb.size(); ++i) {
      const auto& pair = sb[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
        parse_fail("sectional_bounds[" + std::to_string(i) + "]: expected [min, max]");
      cfg.sectional_bounds.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    if (cfg.sectional_bounds.size() != r) parse_fail("sectional_bounds: expected one [min, max] per factor");
  }

  if (doc.contains("output")) {
    const auto& out = doc.at("output");
    reject_unknown(out, "output", {"dir", "format", "thin", "plots"});
    cfg.output.dir = get_string(out, "dir", "output", "");
    cfg.output.format = parse_format(get_string(out, "format", "output", "csv"), "output.format");
    const auto thin = get_integer(out, "thin", "output", 1);
    if (thin < 1) parse_fail("output.thin: must be >= 1");
    cfg.output.thin = static_cast<std::size_t>(thin);
    if (out.contains("plots")) {
      cfg.output.plots.clear();
      for (const auto& p : get_array(out, "plots", "output")) {
        if (!p.is_string()) parse_fail("output.plots: expected strings");
        cfg.output.plots.push_back(p.get<std::string>());
      }
    }
  }

  if (doc.contains("sweep")) {
    const auto& sw = doc.at("sweep");
    reject_unknown(sw, "sweep", {"ratios", "factor"});
    if (sw.contains("ratios")) {
      cfg.sweep.ratios.clear();
      for (const auto& v : get_array(sw, "ratios", "sweep")) {
        if (!v.is_number()) parse_fail("sweep.ratios: expected numbers");
        cfg.sweep.ratios.push_back(v.get<double>());
      }
    }
    const auto k = get_integer(sw, "factor", "sweep", static_cast<long long>(cfg.sweep.factor));
    if (k < 2) parse_fail("sweep.factor: must name a factor index >= 2");
    cfg.sweep.factor = static_cast<std::size_t>(k);
  }

  if (doc.contains("oracle")) {
    const auto& o = doc.at("oracle");
    reject_unknown(o, "oracle", {"t0_factor", "decades", "rel_tol"});
    cfg.oracle.t0_factor = get_number(o, "t0_factor", "oracle", cfg.oracle.t0_factor);
    cfg.oracle.decades = get_number(o, "decades", "oracle", cfg.oracle.decades);
    cfg.oracle.rel_tol = get_number(o, "rel_tol", "oracle", cfg.oracle.rel_tol);
  }

  revalidate(cfg);
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cli", Errc::IoError, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace solitonforge::cli
