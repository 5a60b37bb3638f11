#pragma once

// Scenario files (JSON, "schema": 1) and what the command-line front end does
// with them: characteristic tables, zero dumps and check runs.
//
//   {
//     "schema": 1,
//     "sector": {"alpha": 0, "beta": "pi"},
//     "curves": {"f": ["1", "exp(z)"]},
//     "functions": {"g": {"num": "z-2", "den": "1"}},
//     "targets": {"Q": "x0 + x1"},
//     "hyperplanes": {"H": ["x0", "x1", [1, 1]]},
//     "grid": {"r_min": 10, "r_max": 1000, "count": 24, "spacing": "geometric"},
//     "table": {"curve": "f", "target": "Q", "functionals": ["T", "m", "N"]},
//     "checks": [{"kind": "fmt_tsuji", "params": {"curve": "f", "target": "Q"}}],
//     "quadrature": {...}, "zeros": {...}, "tolerances": {...}, "seed": 0
//   }

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nevang/errors.hpp"
#include "nevang/nevanlinna.hpp"
#include "nevang/projective.hpp"
#include "nevang/theorem_lab.hpp"

namespace nevang {

using json = nlohmann::json;

struct CheckSpec {
  std::string kind;
  std::string name;
  json params;
  std::string path;  // "checks[i]" for diagnostics
};

struct TableSpec {
  std::string curve;
  std::string target;
  std::string function;
  std::vector<std::string> functionals;
};

struct Scenario {
  json raw;
  std::string hash;
  Sector sector{0.0, kPi};
  std::map<std::string, std::vector<std::string>> curves;
  std::map<std::string, std::pair<std::string, std::string>> functions;
  std::map<std::string, json> targets;
  std::map<std::string, json> hyperplanes;
  RGrid grid;
  std::vector<CheckSpec> checks;
  std::optional<TableSpec> table;
  LabConfig cfg;
};

namespace detail {

[[noreturn]] inline void field_error(const std::string& path, const std::string& msg) {
  throw InputError(path + ": " + msg);
}

// Angle: a number, or text like "pi", "-pi/4", "3*pi/2", "0.5".
inline double parse_angle(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) field_error(path, "expected a number or an angle string such as \"pi/4\"");
  std::string s = j.get<std::string>();
  std::string t;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  }
  double sign = 1.0;
  std::size_t p = 0;
  if (p < t.size() && (t[p] == '-' || t[p] == '+')) sign = t[p++] == '-' ? -1.0 : 1.0;
  double coef = 1.0, den = 1.0;
  bool has_pi = false;
  const std::string body = t.substr(p);
  const std::size_t pi_at = body.find("pi");
  try {
    if (pi_at == std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(body, &used);
      if (used != body.size()) throw std::invalid_argument("trailing");
      return sign * v;
    }
    has_pi = true;
    std::string pre = body.substr(0, pi_at), post = body.substr(pi_at + 2);
    if (!pre.empty()) {
      if (pre.back() != '*') throw std::invalid_argument("coef");
      pre.pop_back();
      std::size_t used = 0;
      coef = std::stod(pre, &used);
      if (used != pre.size()) throw std::invalid_argument("coef");
    }
    if (!post.empty()) {
      if (post[0] != '/') throw std::invalid_argument("den");
      std::size_t used = 0;
      den = std::stod(post.substr(1), &used);
      if (used != post.size() - 1 || den == 0.0) throw std::invalid_argument("den");
    }
  } catch (const std::exception&) {
    field_error(path, "cannot read angle \"" + s + "\"");
  }
  return sign * coef * (has_pi ? kPi : 1.0) / den;
}

inline Complex parse_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  field_error(path, "expected a number or a [re, im] pair");
}

inline const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) field_error(path, std::string("missing field \"") + key + "\"");
  return obj.at(key);
}

inline std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) field_error(path + "." + key, "expected a string");
  return v.get<std::string>();
}

inline int require_int(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) field_error(path + "." + key, "expected an integer");
  return v.get<int>();
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    field_error(path + "." + key, "wrong type");
  }
}

inline RGrid parse_grid(const json& j, const std::string& path) {
  if (!j.is_object()) field_error(path, "expected an object");
  RGrid g;
  g.r_min = get_or<double>(j, "r_min", g.r_min, path);
  g.r_max = get_or<double>(j, "r_max", g.r_max, path);
  g.count = get_or<int>(j, "count", g.count, path);
  const std::string sp = get_or<std::string>(j, "spacing", "geometric", path);
  if (sp == "geometric") g.spacing = RGrid::Spacing::Geometric;
  else if (sp == "linear") g.spacing = RGrid::Spacing::Linear;
  else field_error(path + ".spacing", "expected \"geometric\" or \"linear\"");
  try {
    g.validate();
  } catch (const InputError& e) {
    field_error(path, e.what());
  }
  return g;
}

inline Sector parse_sector(const json& j, const std::string& path) {
  const double a = parse_angle(require(j, "alpha", path), path + ".alpha");
  const double b = parse_angle(require(j, "beta", path), path + ".beta");
  try {
    return Sector(a, b);
  } catch (const InputError& e) {
    field_error(path, e.what());
  }
}

inline void apply_config(LabConfig& cfg, const json& raw) {
  if (raw.contains("quadrature")) {
    const json& q = raw["quadrature"];
    cfg.quad.abs_tol = get_or<double>(q, "abs_tol", cfg.quad.abs_tol, "quadrature");
    cfg.quad.rel_tol = get_or<double>(q, "rel_tol", cfg.quad.rel_tol, "quadrature");
    cfg.quad.max_panels = get_or<int>(q, "max_panels", cfg.quad.max_panels, "quadrature");
    cfg.quad.singularity_pad = get_or<double>(q, "singularity_pad", cfg.quad.singularity_pad, "quadrature");
  }
  if (raw.contains("zeros")) {
    const json& z = raw["zeros"];
    cfg.zeros.tol = get_or<double>(z, "tol", cfg.zeros.tol, "zeros");
    cfg.zeros.path_eps = get_or<double>(z, "path_eps", cfg.zeros.path_eps, "zeros");
    cfg.zeros.max_depth = get_or<int>(z, "max_depth", cfg.zeros.max_depth, "zeros");
    cfg.zeros.max_jitter = get_or<int>(z, "max_jitter", cfg.zeros.max_jitter, "zeros");
  }
  if (raw.contains("tolerances")) {
    const json& t = raw["tolerances"];
    cfg.slope_tol = get_or<double>(t, "slope", cfg.slope_tol, "tolerances");
    cfg.bound_cap_per_degree = get_or<double>(t, "bound_cap", cfg.bound_cap_per_degree, "tolerances");
    if (t.contains("range_cap")) cfg.range_cap = get_or<double>(t, "range_cap", 0.0, "tolerances");
    cfg.slack_tol = get_or<double>(t, "slack", cfg.slack_tol, "tolerances");
    cfg.satisfaction = get_or<double>(t, "satisfaction", cfg.satisfaction, "tolerances");
    cfg.exceptional_fraction = get_or<double>(t, "exceptional_fraction", cfg.exceptional_fraction, "tolerances");
    cfg.lambda_max = get_or<double>(t, "lambda_max", cfg.lambda_max, "tolerances");
    cfg.ratio_bound = get_or<double>(t, "ratio_bound", cfg.ratio_bound, "tolerances");
    cfg.epsilon_max = get_or<double>(t, "epsilon_max", cfg.epsilon_max, "tolerances");
  }
  cfg.seed = get_or<std::uint64_t>(raw, "seed", cfg.seed, "seed");
  cfg.zeros.seed = cfg.seed;
}

}  // namespace detail

inline void validate_checks(const Scenario& sc);

inline Scenario parse_scenario(const json& raw) {
  using namespace detail;
  if (!raw.is_object()) throw InputError("scenario: top level must be a JSON object");
  const json& schema = require(raw, "schema", "scenario");
  if (!schema.is_number_integer() || schema.get<int>() != 1) field_error("schema", "only schema 1 is supported");
  Scenario sc;
  sc.raw = raw;
  sc.hash = fnv1a_hex(raw.dump());
  if (raw.contains("sector")) sc.sector = parse_sector(raw["sector"], "sector");
  if (raw.contains("curves")) {
    if (!raw["curves"].is_object()) field_error("curves", "expected an object");
    for (const auto& [name, comps] : raw["curves"].items()) {
      const std::string path = "curves." + name;
      if (!comps.is_array() || comps.size() < 2) field_error(path, "expected a list of at least two component expressions");
      std::vector<std::string> texts;
      for (const json& c : comps) {
        if (!c.is_string()) field_error(path, "components must be expression strings");
        texts.push_back(c.get<std::string>());
      }
      sc.curves[name] = texts;
    }
  }
  if (raw.contains("functions")) {
    if (!raw["functions"].is_object()) field_error("functions", "expected an object");
    for (const auto& [name, f] : raw["functions"].items()) {
      const std::string path = "functions." + name;
      if (f.is_string()) sc.functions[name] = {f.get<std::string>(), "1"};
      else sc.functions[name] = {require_string(f, "num", path), get_or<std::string>(f, "den", "1", path)};
    }
  }
  if (raw.contains("targets")) {
    if (!raw["targets"].is_object()) field_error("targets", "expected an object");
    for (const auto& [name, t] : raw["targets"].items()) {
      if (!t.is_string() && !t.is_object()) field_error("targets." + name, "expected a form string or a form object");
      sc.targets[name] = t;
    }
  }
  if (raw.contains("hyperplanes")) {
    if (!raw["hyperplanes"].is_object()) field_error("hyperplanes", "expected an object");
    for (const auto& [name, hs] : raw["hyperplanes"].items()) {
      if (!hs.is_array() || hs.empty()) field_error("hyperplanes." + name, "expected a nonempty list");
      sc.hyperplanes[name] = hs;
    }
  }
  if (raw.contains("grid")) sc.grid = parse_grid(raw["grid"], "grid");
  if (raw.contains("table")) {
    const json& t = raw["table"];
    TableSpec ts;
    ts.curve = get_or<std::string>(t, "curve", "", "table");
    ts.target = get_or<std::string>(t, "target", "", "table");
    ts.function = get_or<std::string>(t, "function", "", "table");
    ts.functionals = get_or<std::vector<std::string>>(t, "functionals", {}, "table");
    sc.table = ts;
  }
  if (raw.contains("checks")) {
    if (!raw["checks"].is_array()) field_error("checks", "expected a list");
    int i = 0;
    for (const json& c : raw["checks"]) {
      const std::string path = "checks[" + std::to_string(i++) + "]";
      CheckSpec cs;
      cs.path = path;
      cs.kind = require_string(c, "kind", path);
      cs.name = get_or<std::string>(c, "name", cs.kind, path);
      cs.params = c.contains("params") ? c["params"] : json::object();
      if (!cs.params.is_object()) field_error(path + ".params", "expected an object");
      sc.checks.push_back(cs);
    }
  }
  apply_config(sc.cfg, raw);
  validate_checks(sc);
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file " + path);
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": malformed JSON (" + e.what() + ")");
  }
  return parse_scenario(raw);
}

// ---------------------------------------------------------------------------
// Name resolution

namespace detail {

inline Curve resolve_curve(const Scenario& sc, const std::string& name, const std::string& path) {
  auto it = sc.curves.find(name);
  if (it == sc.curves.end()) field_error(path, "unknown curve \"" + name + "\"");
  try {
    return Curve::parse(it->second);
  } catch (const ParseError& e) {
    field_error("curves." + name, e.what());
  }
}

inline MeroFn resolve_function(const Scenario& sc, const std::string& name, const std::string& path) {
  auto it = sc.functions.find(name);
  if (it == sc.functions.end()) field_error(path, "unknown function \"" + name + "\"");
  try {
    return MeroFn::parse(it->second.first, it->second.second);
  } catch (const ParseError& e) {
    field_error("functions." + name, e.what());
  }
}

inline HomogForm form_from(const json& t, int n_vars, const std::string& path) {
  try {
    HomogForm q = t.is_string() ? parse_homog(t.get<std::string>(), n_vars) : homog_from_json(t);
    if (q.n_vars() != n_vars) field_error(path, "form has " + std::to_string(q.n_vars()) + " variables, curve needs " +
                                                    std::to_string(n_vars));
    return q;
  } catch (const ParseError& e) {
    field_error(path, e.what());
  }
}

// A target name from "targets", or an inline form string.
inline HomogForm resolve_form(const Scenario& sc, const json& ref, int n_vars, const std::string& path) {
  if (ref.is_string()) {
    auto it = sc.targets.find(ref.get<std::string>());
    if (it != sc.targets.end()) return form_from(it->second, n_vars, "targets." + it->first);
  }
  if (ref.is_string() || ref.is_object()) return form_from(ref, n_vars, path);
  field_error(path, "expected a target name or a form");
}

inline std::vector<HyperplaneVec> resolve_hyperplanes(const Scenario& sc, const json& ref, int n_vars,
                                                      const std::string& path) {
  json list = ref;
  std::string where = path;
  if (ref.is_string()) {
    auto it = sc.hyperplanes.find(ref.get<std::string>());
    if (it == sc.hyperplanes.end()) field_error(path, "unknown hyperplane set \"" + ref.get<std::string>() + "\"");
    list = it->second;
    where = "hyperplanes." + it->first;
  }
  if (!list.is_array()) field_error(where, "expected a list of hyperplanes");
  std::vector<HyperplaneVec> out;
  int i = 0;
  for (const json& h : list) {
    const std::string p = where + "[" + std::to_string(i++) + "]";
    if (h.is_string()) {
      const HomogForm q = form_from(h, n_vars, p);
      if (q.degree() != 1) field_error(p, "a hyperplane must be a linear form");
      out.push_back(q.linear_coefficients());
    } else if (h.is_array()) {
      HyperplaneVec v;
      int k = 0;
      for (const json& c : h) v.push_back(parse_complex(c, p + "[" + std::to_string(k++) + "]"));
      if (static_cast<int>(v.size()) != n_vars) field_error(p, "coefficient count does not match the curve");
      out.push_back(v);
    } else {
      field_error(p, "expected a linear form string or a coefficient list");
    }
  }
  return out;
}

inline std::vector<HomogForm> resolve_forms(const Scenario& sc, const json& ref, int n_vars, const std::string& path) {
  if (!ref.is_array()) field_error(path, "expected a list of forms");
  std::vector<HomogForm> out;
  int i = 0;
  for (const json& f : ref) out.push_back(resolve_form(sc, f, n_vars, path + "[" + std::to_string(i++) + "]"));
  return out;
}

inline Variant parse_variant(const json& params, const std::string& path) {
  const std::string v = get_or<std::string>(params, "variant", "angular", path);
  if (v == "angular") return Variant::Angular;
  if (v == "tsuji") return Variant::Tsuji;
  field_error(path + ".variant", "expected \"angular\" or \"tsuji\"");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Checks

inline const std::vector<std::string>& check_kinds() {
  static const std::vector<std::string> kinds{"fmt_angular",  "fmt_tsuji",        "carleman",          "tsuji_jensen",
                                              "logderiv",     "smt_angular",      "smt_tsuji",         "hypersurface_smt",
                                              "uniqueness_chain", "smt_variety", "wronskian_identities"};
  return kinds;
}

inline DefectReport run_check(const Scenario& sc, const CheckSpec& c) {
  using namespace detail;
  const json& p = c.params;
  const std::string pp = c.path + ".params";
  const Sector s = p.contains("sector") ? parse_sector(p["sector"], pp + ".sector") : sc.sector;
  const RGrid grid = p.contains("grid") ? parse_grid(p["grid"], pp + ".grid") : sc.grid;
  LabConfig cfg = sc.cfg;
  if (p.contains("range_cap")) cfg.range_cap = get_or<double>(p, "range_cap", 0.0, pp);

  auto curve = [&](const char* key) { return resolve_curve(sc, require_string(p, key, pp), pp + "." + key); };
  auto function = [&] { return resolve_function(sc, require_string(p, "function", pp), pp + ".function"); };

  DefectReport rep;
  const std::string& k = c.kind;
  if (k == "fmt_angular" || k == "fmt_tsuji") {
    const Curve f = curve("curve");
    const HomogForm q = resolve_form(sc, require(p, "target", pp), f.dim() + 1, pp + ".target");
    rep = k == "fmt_angular" ? check_fmt_angular(f, q, s, grid, cfg) : check_fmt_tsuji(f, q, s, grid, cfg);
  } else if (k == "carleman") {
    rep = check_carleman(function(), s, grid, cfg);
  } else if (k == "tsuji_jensen") {
    rep = check_tsuji_jensen(function(), s, grid, cfg);
  } else if (k == "logderiv") {
    rep = check_logderiv(function(), get_or<int>(p, "order", 1, pp), s, grid, parse_variant(p, pp), cfg);
  } else if (k == "smt_angular" || k == "smt_tsuji") {
    const Curve f = curve("curve");
    const auto hs = resolve_hyperplanes(sc, require(p, "hyperplanes", pp), f.dim() + 1, pp + ".hyperplanes");
    rep = k == "smt_angular" ? check_smt_angular(f, hs, s, grid, cfg) : check_smt_tsuji(f, hs, s, grid, cfg);
  } else if (k == "hypersurface_smt" || k == "uniqueness_chain") {
    const Curve f = curve("curve");
    const auto hs = resolve_hyperplanes(sc, require(p, "hyperplanes", pp), f.dim() + 1, pp + ".hyperplanes");
    const auto qs = resolve_forms(sc, require(p, "forms", pp), f.dim() + 1, pp + ".forms");
    const int n = require_int(p, "n", pp);
    if (k == "hypersurface_smt") {
      rep = check_hypersurface_smt(f, hs, qs, n, s, grid, cfg);
    } else {
      const Curve g = curve("other_curve");
      rep = check_uniqueness_chain(f, g, hs, qs, n, get_or<int>(p, "i", 1, pp), get_or<int>(p, "j", 0, pp), s, grid, cfg);
    }
  } else if (k == "smt_variety") {
    const Curve f = curve("curve");
    const auto qs = resolve_forms(sc, require(p, "forms", pp), f.dim() + 1, pp + ".forms");
    const json& eps = require(p, "epsilon", pp);
    if (!eps.is_number()) field_error(pp + ".epsilon", "expected a number");
    rep = check_smt_variety(f, qs, require_int(p, "M", pp), eps.get<double>(), s, grid, cfg);
  } else if (k == "wronskian_identities") {
    const Curve f = curve("curve");
    std::optional<std::vector<HyperplaneVec>> forms;
    if (p.contains("forms")) forms = resolve_hyperplanes(sc, p["forms"], f.dim() + 1, pp + ".forms");
    rep = check_wronskian_identities(f, forms, get_or<int>(p, "samples", 100, pp), cfg);
  } else {
    field_error(c.path + ".kind", "unknown check kind \"" + k + "\"");
  }
  rep.scenario_hash = sc.hash;
  return rep;
}

// Resolves every name and override a check refers to, without running it.
inline void validate_checks(const Scenario& sc) {
  using namespace detail;
  const auto& kinds = check_kinds();
  for (const CheckSpec& c : sc.checks) {
    if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
      field_error(c.path + ".kind", "unknown check kind \"" + c.kind + "\"");
    const json& p = c.params;
    const std::string pp = c.path + ".params";
    if (p.contains("sector")) parse_sector(p["sector"], pp + ".sector");
    if (p.contains("grid")) parse_grid(p["grid"], pp + ".grid");
    if (p.contains("function")) resolve_function(sc, require_string(p, "function", pp), pp + ".function");
    if (c.kind == "carleman" || c.kind == "tsuji_jensen" || c.kind == "logderiv") {
      require_string(p, "function", pp);
      if (c.kind == "logderiv") parse_variant(p, pp);
      continue;
    }
    const Curve f = resolve_curve(sc, require_string(p, "curve", pp), pp + ".curve");
    const int nv = f.dim() + 1;
    if (p.contains("other_curve")) resolve_curve(sc, require_string(p, "other_curve", pp), pp + ".other_curve");
    if (p.contains("target")) resolve_form(sc, p["target"], nv, pp + ".target");
    if (c.kind == "wronskian_identities") {
      if (p.contains("forms")) resolve_hyperplanes(sc, p["forms"], nv, pp + ".forms");
      continue;
    }
    if (p.contains("hyperplanes")) resolve_hyperplanes(sc, p["hyperplanes"], nv, pp + ".hyperplanes");
    if (p.contains("forms")) resolve_forms(sc, p["forms"], nv, pp + ".forms");
  }
}

// ---------------------------------------------------------------------------
// Characteristic tables

struct Table {
  std::vector<std::string> columns;  // first column is "r"
  std::vector<std::vector<double>> rows;
};

inline const std::vector<std::string>& curve_functionals() {
  static const std::vector<std::string> names{"S", "A", "B", "C", "Cn", "T", "m", "N", "Nn", "N1", "T_plane"};
  return names;
}
inline const std::vector<std::string>& scalar_functionals() {
  static const std::vector<std::string> names{"A", "B", "C", "S", "m", "N", "T", "T_plane"};
  return names;
}

inline Table compute_table(const Scenario& sc, TableSpec spec) {
  using namespace detail;
  const bool scalar = !spec.function.empty();
  if (!scalar && spec.curve.empty()) field_error("table", "name a curve or a function");
  const auto& allowed = scalar ? scalar_functionals() : curve_functionals();
  if (spec.functionals.empty()) spec.functionals = {"S", "T"};
  bool needs_target = false;
  for (std::size_t i = 0; i < spec.functionals.size(); ++i) {
    const std::string& f = spec.functionals[i];
    if (std::find(allowed.begin(), allowed.end(), f) == allowed.end()) {
      field_error("table.functionals[" + std::to_string(i) + "]", "unknown functional \"" + f + "\"");
    }
    if (!scalar && f != "S" && f != "T" && f != "T_plane") needs_target = true;
  }
  const std::vector<double> radii = sc.grid.nominal();
  Table tab;
  tab.columns.push_back("r");
  for (const auto& f : spec.functionals) tab.columns.push_back(f);
  const Sector& s = sc.sector;
  const auto& q = sc.cfg.quad;

  if (scalar) {
    const MeroFn mf = resolve_function(sc, spec.function, "table.function");
    ScalarContext c(mf, s, sc.cfg.zeros);
    c.zeros(warm_radius(sc.grid));
    tab.rows = parallel_map<std::vector<double>>(static_cast<int>(radii.size()), sc.cfg.threads, [&](int i) {
      const double r = radii[i];
      std::vector<double> row{r};
      for (const auto& f : spec.functionals) {
        if (f == "A") row.push_back(A_scalar(c, r, q));
        else if (f == "B") row.push_back(B_scalar(c, r, q));
        else if (f == "C") row.push_back(C_scalar(c, r));
        else if (f == "S") row.push_back(S_scalar(c, r, q));
        else if (f == "m") row.push_back(m_tsuji_scalar(c, r, q));
        else if (f == "N") row.push_back(N_tsuji_scalar(c, r));
        else if (f == "T") row.push_back(T_tsuji_scalar(c, r, q));
        else row.push_back(plane_characteristic(mf, r, q));
      }
      return row;
    });
    return tab;
  }

  const Curve f = resolve_curve(sc, spec.curve, "table.curve");
  std::optional<CurveTarget> t;
  if (needs_target) {
    if (spec.target.empty()) field_error("table.target", "the requested functionals need a target");
    t.emplace(f, resolve_form(sc, json(spec.target), f.dim() + 1, "table.target"), s, sc.cfg.zeros);
    t->zeros(warm_radius(sc.grid));
  }
  const Truncation tn = Truncation::at(f.dim());
  tab.rows = parallel_map<std::vector<double>>(static_cast<int>(radii.size()), sc.cfg.threads, [&](int i) {
    const double r = radii[i];
    std::vector<double> row{r};
    for (const auto& name : spec.functionals) {
      if (name == "S") row.push_back(char_S(f, s, r, q));
      else if (name == "T") row.push_back(char_T_tsuji(f, s, r, q));
      else if (name == "T_plane") row.push_back(char_cartan_plane(f, r, q).value);
      else if (name == "A") row.push_back(proximity_A(*t, r, q));
      else if (name == "B") row.push_back(proximity_B(*t, r, q));
      else if (name == "C") row.push_back(counting_C(*t, r));
      else if (name == "Cn") row.push_back(counting_C(*t, r, tn));
      else if (name == "m") row.push_back(proximity_m_tsuji(*t, r, q));
      else if (name == "N") row.push_back(counting_N_tsuji(*t, r));
      else if (name == "Nn") row.push_back(counting_N_tsuji(*t, r, tn));
      else row.push_back(counting_N_tsuji(*t, r, Truncation::at(1)));
    }
    return row;
  });
  return tab;
}

// Shortest text that reads back to the same double.
// Shortest round-trip text.
inline std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += '\n';
  }
  return out;
}

inline Table parse_csv(const std::string& text, const std::string& path = "table") {
  Table t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    return cells;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (t.columns.empty()) {
      t.columns = cells;
      if (t.columns.empty() || t.columns[0] != "r") throw InputError(path + ": line 1: first column must be \"r\"");
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw InputError(path + ": line " + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) + " fields");
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (c.empty() || *end != '\0') throw InputError(path + ": line " + std::to_string(lineno) + ": bad number \"" + c + "\"");
      row.push_back(v);
    }
    t.rows.push_back(row);
  }
  if (t.columns.empty()) throw InputError(path + ": empty table");
  return t;
}

}  // namespace nevang
