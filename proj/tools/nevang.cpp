// nevang: scenario-driven front end.
//
//   nevang table    --scenario s.json [--functionals S,T,m] [--out t.csv]
//   nevang zeros    --scenario s.json --curve f --target Q [--region tsuji] [--r 50]
//   nevang verify   --scenario s.json [--out reports.jsonl]
//   nevang plotdata --scenario s.json --out dir [--from-table t.csv]
//
// Exit codes: 0 ok, 1 a check failed, 2 input error, 3 numerical failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nevang/scenario.hpp"

namespace {

using namespace nevang;

enum Exit { kOk = 0, kCheckFail = 1, kInput = 2, kNumerical = 3 };

struct Common {
  std::string scenario;
  std::string out;
  int threads = 1;
  std::optional<double> tol_slope, tol_bound_cap, tol_range_cap, tol_slack, tol_lambda, tol_ratio, tol_epsilon;
  std::optional<double> tol_quad_abs, tol_quad_rel, tol_zero;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "scenario JSON file")->required();
  cmd->add_option("--out", c.out, "output path (default: standard output)");
  cmd->add_option("--threads", c.threads, "worker threads for per-radius evaluation")->check(CLI::PositiveNumber);
  cmd->add_option("--tol-slope", c.tol_slope, "max |slope| of a bounded defect against log r");
  cmd->add_option("--tol-bound-cap", c.tol_bound_cap, "max |defect| per unit degree");
  cmd->add_option("--tol-range-cap", c.tol_range_cap, "max range of a bounded defect");
  cmd->add_option("--tol-slack", c.tol_slack, "slack below -tol counts as a violation");
  cmd->add_option("--tol-lambda", c.tol_lambda, "max fitted lambda");
  cmd->add_option("--tol-ratio", c.tol_ratio, "bound for logarithmic-derivative ratios");
  cmd->add_option("--tol-epsilon", c.tol_epsilon, "max fitted epsilon for the hypersurface check");
  cmd->add_option("--tol-quad-abs", c.tol_quad_abs, "quadrature absolute tolerance");
  cmd->add_option("--tol-quad-rel", c.tol_quad_rel, "quadrature relative tolerance");
  cmd->add_option("--tol-zero", c.tol_zero, "zero-locator position tolerance");
}

Scenario load(const Common& c) {
  Scenario sc = load_scenario(c.scenario);
  LabConfig& k = sc.cfg;
  k.threads = c.threads;
  if (c.tol_slope) k.slope_tol = *c.tol_slope;
  if (c.tol_bound_cap) k.bound_cap_per_degree = *c.tol_bound_cap;
  if (c.tol_range_cap) k.range_cap = *c.tol_range_cap;
  if (c.tol_slack) k.slack_tol = *c.tol_slack;
  if (c.tol_lambda) k.lambda_max = *c.tol_lambda;
  if (c.tol_ratio) k.ratio_bound = *c.tol_ratio;
  if (c.tol_epsilon) k.epsilon_max = *c.tol_epsilon;
  if (c.tol_quad_abs) k.quad.abs_tol = *c.tol_quad_abs;
  if (c.tol_quad_rel) k.quad.rel_tol = *c.tol_quad_rel;
  if (c.tol_zero) k.zeros.tol = *c.tol_zero;
  return sc;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct TableArgs {
  std::string curve, target, function, functionals;
};

void add_table_args(CLI::App* cmd, TableArgs& t) {
  cmd->add_option("--curve", t.curve, "curve name (overrides the scenario's table section)");
  cmd->add_option("--target", t.target, "target name or form");
  cmd->add_option("--function", t.function, "scalar function name");
  cmd->add_option("--functionals", t.functionals, "comma-separated functional names");
}

TableSpec table_spec(const Scenario& sc, const TableArgs& a) {
  TableSpec spec = sc.table.value_or(TableSpec{});
  if (!a.curve.empty()) {
    spec.curve = a.curve;
    spec.function.clear();
  }
  if (!a.function.empty()) {
    spec.function = a.function;
    spec.curve.clear();
  }
  if (!a.target.empty()) spec.target = a.target;
  if (!a.functionals.empty()) spec.functionals = split_list(a.functionals);
  return spec;
}

int cmd_table(const Common& c, const TableArgs& a) {
  const Scenario sc = load(c);
  emit(c.out, to_csv(compute_table(sc, table_spec(sc, a))));
  return kOk;
}

int cmd_zeros(const Common& c, const TableArgs& a, const std::string& region, double r, double r_lo) {
  const Scenario sc = load(c);
  EntireFunction g;
  if (!a.function.empty()) {
    g = detail::resolve_function(sc, a.function, "--function").num();
  } else {
    if (a.curve.empty() || a.target.empty()) throw InputError("--curve and --target (or --function) are required");
    const Curve f = detail::resolve_curve(sc, a.curve, "--curve");
    g = compose(detail::resolve_form(sc, json(a.target), f.dim() + 1, "--target"), f).fn;
  }
  if (!(r > 1.0)) throw InputError("--r must exceed 1");
  if (region != "sector" && region != "tsuji") throw InputError("--region must be \"sector\" or \"tsuji\"");
  const RegionSpec reg =
      region == "sector" ? RegionSpec::sector_annulus(sc.sector, r_lo, r) : RegionSpec::tsuji(sc.sector, r);
  const auto zs = zeros_in_region(g, reg, sc.cfg.zeros);
  std::string csv = "re,im,modulus,arg,multiplicity,residual\n";
  for (const ZeroRecord& z : zs) {
    csv += format_double(z.location.real()) + "," + format_double(z.location.imag()) + "," +
           format_double(std::abs(z.location)) + "," + format_double(std::arg(z.location)) + "," +
           std::to_string(z.multiplicity) + "," + format_double(z.residual) + "\n";
  }
  emit(c.out, csv);
  return kOk;
}

int cmd_verify(const Common& c, const std::string& only) {
  const Scenario sc = load(c);
  if (!only.empty() && std::none_of(sc.checks.begin(), sc.checks.end(), [&](const CheckSpec& k) { return k.name == only; }))
    throw InputError("--only: no check named \"" + only + "\"");
  std::string stream;
  bool failed = false;
  for (const CheckSpec& chk : sc.checks) {
    if (!only.empty() && chk.name != only) continue;
    const DefectReport rep = run_check(sc, chk);
    nlohmann::ordered_json j = to_json(rep);
    j["name"] = chk.name;
    stream += j.dump() + "\n";
    std::cerr << chk.name << " [" << chk.kind << "]: " << verdict_name(rep.verdict) << "\n";
    if (rep.verdict == Verdict::HypothesisViolated) {
      std::cerr << "warning: " << chk.name << ": hypotheses not met, no verdict\n";
    }
    if (rep.verdict == Verdict::Fail || rep.verdict == Verdict::Inconclusive) failed = true;
  }
  emit(c.out, stream);
  return failed ? kCheckFail : kOk;
}

int cmd_plotdata(const Common& c, const TableArgs& a, const std::string& from_table) {
  if (c.out.empty()) throw InputError("plotdata needs --out <directory>");
  Table tab;
  if (!from_table.empty()) {
    std::ifstream in(from_table);
    if (!in) throw InputError("cannot open " + from_table);
    std::stringstream ss;
    ss << in.rdbuf();
    tab = parse_csv(ss.str(), from_table);
  } else {
    const Scenario sc = load(c);
    tab = compute_table(sc, table_spec(sc, a));
  }
  namespace fs = std::filesystem;
  fs::create_directories(c.out);
  std::string gp = "set logscale x\nset xlabel \"r\"\nset key left top\nplot";
  for (std::size_t col = 1; col < tab.columns.size(); ++col) {
    const std::string file = tab.columns[col] + ".dat";
    std::string data;
    for (const auto& row : tab.rows) data += format_double(row[0]) + " " + format_double(row[col]) + "\n";
    emit((fs::path(c.out) / file).string(), data);
    gp += std::string(col > 1 ? ", \\\n    " : " ") + "\"" + file + "\" using 1:2 with linespoints title \"" +
          tab.columns[col] + "\"";
  }
  gp += "\n";
  emit((fs::path(c.out) / "plot.gp").string(), gp);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Angular and Tsuji Nevanlinna functionals of holomorphic curves"};
  app.require_subcommand(1);

  Common common;
  TableArgs targs;
  std::string region = "sector", from_table, only;
  double r = 10.0, r_lo = 1.0;

  auto* table = app.add_subcommand("table", "characteristic table as CSV");
  add_common(table, common);
  add_table_args(table, targs);

  auto* zeros = app.add_subcommand("zeros", "zeros of Q(f) in a region as CSV");
  add_common(zeros, common);
  add_table_args(zeros, targs);
  zeros->add_option("--region", region, "sector (annulus r_lo ≤ |z| ≤ r) or tsuji");
  zeros->add_option("--r", r, "outer radius");
  zeros->add_option("--r-lo", r_lo, "inner radius for the sector region");

  auto* verify = app.add_subcommand("verify", "run the scenario's checks; JSON lines out, summary on stderr");
  add_common(verify, common);
  verify->add_option("--only", only, "run only the check with this name");

  auto* plot = app.add_subcommand("plotdata", "two-column data files and a gnuplot command file");
  add_common(plot, common);
  add_table_args(plot, targs);
  plot->add_option("--from-table", from_table, "reuse a CSV written by `table`");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*table) return cmd_table(common, targs);
    if (*zeros) return cmd_zeros(common, targs, region, r, r_lo);
    if (*verify) return cmd_verify(common, only);
    if (*plot) return cmd_plotdata(common, targs, from_table);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kInput;
}
