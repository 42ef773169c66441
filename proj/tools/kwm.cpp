/*
 *   Copyright 2026 The kwmoments Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
 */

// kwm: command-line front end. stdout carries JSON or nothing; diagnostics go
// to stderr. Exit codes: 0 success, 1 verification failure, 2 usage or
// domain error.

#include <kwm/baselines.hpp>
#include <kwm/calibration.hpp>
#include <kwm/exact_moments.hpp>
#include <kwm/kwise_sim.hpp>
#include <kwm/oracle.hpp>
#include <kwm/sharp_bounds.hpp>
#include <kwm/verify.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef KWM_DEFAULT_CALIBRATION
#define KWM_DEFAULT_CALIBRATION "data/calibration.json"
#endif

namespace {

using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

/// Flag or domain error; reported as a one-line diagnostic with exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

kwm::Rational parse_rational(const std::string& flag, const std::string& text) {
  try {
    return kwm::Rational::parse(text);
  } catch (const std::exception& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

double parse_real(const std::string& flag, const std::string& text) { return parse_rational(flag, text).to_double(); }

std::vector<kwm::Rational> parse_rational_list(const std::string& flag, const std::string& text) {
  std::vector<kwm::Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(flag, item));
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string default_calibration_path() { return kwm::calibration_path(KWM_DEFAULT_CALIBRATION); }

/// Calibrated constants, or nullopt (with a warning) when the file is unusable.
std::optional<kwm::CalibrationConstants> load_constants() {
  if (auto f = kwm::try_load_calibration(default_calibration_path())) return f->constants;
  return std::nullopt;
}

// bound ---------------------------------------------------------------------

struct BoundArgs {
  long n = 0;
  std::string sigma2;
  long d = 0;
  std::optional<long> k;
  std::optional<std::string> t;
  std::string mode = "unit";
};

int cmd_bound(const BoundArgs& a) {
  kwm::BoundQuery q{a.n, parse_real("--sigma2", a.sigma2), a.d, a.k.value_or(a.d)};
  q.validate();
  kwm::BoundResult r = kwm::sharp_bound_M(q);
  double c = 1.0;
  if (a.mode == "calibrated") {
    if (auto constants = load_constants()) {
      r = kwm::sharp_bound_M(q, *constants);
      c = (*constants)[r.regime];
    }
  }
  json out{{"M", r.value},
           {"regime", kwm::to_string(r.regime)},
           {"branch", r.branch_expression},
           {"mode", kwm::to_string(r.constant_mode)},
           {"constant", c},
           {"n", q.n},
           {"sigma2", q.sigma2},
           {"d", q.d},
           {"k", q.k}};
  if (a.t) out["tail_at_t"] = kwm::tail_bound(q, parse_real("--t", *a.t), c);
  emit(out);
  return exit_ok;
}

// exact ---------------------------------------------------------------------

struct ExactArgs {
  std::string dist;
  std::optional<long> n;
  long d = 0;
  std::optional<std::string> sigma2;
  std::optional<std::string> sigma2_list;
  std::optional<std::string> p;
  int digits = 12;
};

int cmd_exact(const ExactArgs& a) {
  kwm::Rational moment;
  auto forbid = [](bool present, const char* flag, const std::string& dist) {
    if (present) throw UsageError(std::string(flag) + " does not apply to --dist " + dist);
  };
  if (a.dist == "threepoint") {
    forbid(a.sigma2_list.has_value(), "--sigma2-list", a.dist);
    forbid(a.p.has_value(), "--p", a.dist);
    if (!a.n || !a.sigma2) throw UsageError("--dist threepoint needs --n and --sigma2");
    moment = kwm::exact_moment_iid_threepoint({*a.n, a.d, parse_rational("--sigma2", *a.sigma2)});
  } else if (a.dist == "het") {
    forbid(a.sigma2.has_value(), "--sigma2", a.dist);
    forbid(a.p.has_value(), "--p", a.dist);
    if (!a.sigma2_list) throw UsageError("--dist het needs --sigma2-list");
    auto list = parse_rational_list("--sigma2-list", *a.sigma2_list);
    if (a.n && *a.n != static_cast<long>(list.size())) throw UsageError("--n does not match the --sigma2-list length");
    moment = kwm::exact_moment_het_threepoint({a.d, std::move(list)});
  } else {
    forbid(a.sigma2.has_value(), "--sigma2", a.dist);
    forbid(a.sigma2_list.has_value(), "--sigma2-list", a.dist);
    if (!a.n || !a.p) throw UsageError("--dist symbinom needs --n and --p");
    moment = kwm::exact_moment_symmetrized_binomial(*a.n, parse_rational("--p", *a.p), a.d);
  }
  const auto r = kwm::render_moment(moment, a.d, a.digits);
  emit({{"exact", r.exact}, {"decimal", r.decimal}, {"dth_root_decimal", r.dth_root_decimal}});
  return exit_ok;
}

// compare -------------------------------------------------------------------

struct CompareArgs {
  long n = 0;
  long d = 0;
  std::string sigma2;
  std::optional<std::string> mu;
  std::optional<std::string> csv;
};

int cmd_compare(const CompareArgs& a) {
  kwm::BaselineQuery q{a.n, a.d, parse_real("--sigma2", a.sigma2), std::nullopt};
  if (a.mu) q.mu = parse_real("--mu", *a.mu);
  const kwm::ComparisonRow row = kwm::compare_all(q);
  if (a.csv) {
    std::ofstream out(*a.csv);
    if (!out) throw UsageError("cannot write " + *a.csv);
    out << kwm::comparison_csv_header << '\n' << kwm::to_csv_line(row) << '\n';
  }
  emit(kwm::to_json(row));
  return exit_ok;
}

// verify --------------------------------------------------------------------

struct VerifyArgs {
  std::string suite;
  std::uint64_t seed = 42;
  std::optional<long> cases;
  bool include_corner = false;
};

int cmd_verify(const VerifyArgs& a) {
  if (a.cases && *a.cases < 1) throw UsageError("--cases must be positive");
  kwm::VerificationReport rep;
  if (a.suite == "majorization") {
    rep = kwm::verify_majorization(a.seed, a.cases.value_or(500));
  } else if (a.suite == "formula") {
    rep = kwm::verify_formula(a.seed, a.cases.value_or(200));
  } else if (a.suite == "regimes") {
    auto constants = load_constants();
    const bool fitted = !constants;
    if (fitted) constants = kwm::fit_calibration(kwm::acceptance_grid()).constants;
    rep = kwm::verify_regimes(*constants, a.include_corner);
    rep.notes["constants_source"] = fitted ? "fitted in process" : default_calibration_path();
  } else if (a.suite == "dominance") {
    rep = kwm::verify_dominance();
  } else if (a.suite == "symmetrization") {
    rep = kwm::verify_symmetrization(a.seed, a.cases.value_or(200));
  } else if (a.suite == "kwise-exact") {
    rep = kwm::verify_kwise_exact();
  } else if (a.suite == "preliminaries") {
    rep = kwm::verify_preliminaries(a.seed, a.cases.value_or(200));
  } else {
    rep = kwm::verify_binomial();
  }
  rep.seed = a.seed;
  emit(kwm::to_json(rep));
  if (!rep.passed()) {
    std::cerr << "verify: suite " << rep.suite << " has " << rep.failure_count << " failing case(s)\n";
    return exit_failed;
  }
  return exit_ok;
}

// simulate ------------------------------------------------------------------

struct SimulationConfig {
  long n = 0;
  long k = 0;
  double sigma2 = 0.0;
  long p = 0;
  std::uint64_t trials = 0;
  std::vector<double> t_list;
  std::uint64_t seed = 0;
  std::string mode = "auto";
};

/// Mirrors docs/schemas/simulate_config.schema.json.
SimulationConfig parse_simulation_config(const json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  static const std::set<std::string> known{"n", "k", "sigma2", "p", "trials", "t_list", "seed", "mode"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw UsageError("config: unknown field '" + key + "'");
  }
  auto integer = [&j](const char* key, long lo) {
    if (!j.contains(key)) throw UsageError(std::string("config: missing field '") + key + "'");
    if (!j[key].is_number_integer()) throw UsageError(std::string("config: '") + key + "' must be an integer");
    const long v = j[key].get<long>();
    if (v < lo) throw UsageError(std::string("config: '") + key + "' must be >= " + std::to_string(lo));
    return v;
  };
  SimulationConfig c;
  c.n = integer("n", 1);
  c.k = integer("k", 2);
  c.p = integer("p", 2);
  c.trials = static_cast<std::uint64_t>(integer("trials", 1));
  c.seed = static_cast<std::uint64_t>(integer("seed", 0));
  if (!j.contains("sigma2")) throw UsageError("config: missing field 'sigma2'");
  if (j["sigma2"].is_number()) {
    c.sigma2 = j["sigma2"].get<double>();
  } else if (j["sigma2"].is_string()) {
    c.sigma2 = parse_real("sigma2", j["sigma2"].get<std::string>());
  } else {
    throw UsageError("config: 'sigma2' must be a number or a rational string");
  }
  if (!j.contains("t_list") || !j["t_list"].is_array() || j["t_list"].empty()) {
    throw UsageError("config: 't_list' must be a non-empty array");
  }
  for (const auto& t : j["t_list"]) {
    if (!t.is_number() || t.get<double>() < 0.0) throw UsageError("config: 't_list' entries must be non-negative numbers");
    c.t_list.push_back(t.get<double>());
  }
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw UsageError("config: 'mode' must be a string");
    c.mode = j["mode"].get<std::string>();
    if (c.mode != "auto" && c.mode != "exhaustive" && c.mode != "monte_carlo") {
      throw UsageError("config: 'mode' must be auto, exhaustive or monte_carlo");
    }
  }
  if (c.p < c.n) throw UsageError("config: prime field p must be >= n");
  return c;
}

struct SimulateArgs {
  std::string config;
  std::optional<std::string> csv;
};

int cmd_simulate(const SimulateArgs& a) {
  std::ifstream in(a.config);
  if (!in) throw UsageError("cannot open config " + a.config);
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  const SimulationConfig c = parse_simulation_config(raw);
  kwm::KWiseFamily f;
  try {
    f = kwm::build_family(c.n, c.k, c.sigma2, c.p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  const bool small = kwm::seed_space_size(c.p, c.k).has_value();
  const bool exhaustive = c.mode == "exhaustive" || (c.mode == "auto" && small);
  if (exhaustive && !small) throw UsageError("config: exhaustive mode needs p^k <= 10^6");
  if (!exhaustive && c.trials < kwm::min_tail_trials) throw UsageError("config: monte_carlo mode needs trials >= 10000");

  double c_tail = 1.0;
  if (f.m_neg + f.m_pos > 0) {
    if (auto constants = load_constants()) c_tail = (*constants)[kwm::classify_regime(f.bound_query())];
  }
  std::vector<kwm::TailEstimate> rows;
  if (exhaustive) {
    const auto counts = kwm::exhaustive_histogram(f);
    for (double t : c.t_list) rows.push_back(kwm::exhaustive_tail_estimate(f, t, counts, c_tail));
  } else {
    rows = kwm::empirical_tails(f, c.t_list, c.trials, c.seed, c_tail);
  }
  json out{{"family",
            {{"p", f.p},
             {"k", f.k},
             {"n", f.n},
             {"m_neg", f.m_neg},
             {"m_pos", f.m_pos},
             {"sigma2", c.sigma2},
             {"sigma2_hat", f.sigma2_hat().to_string()},
             {"quantization_error", f.quantization_error()}}},
           {"mode", exhaustive ? "exhaustive" : "monte_carlo"},
           {"seed", c.seed},
           {"tail_constant", c_tail},
           {"rows", json::array()}};
  for (const auto& r : rows) out["rows"].push_back(kwm::to_json(r));
  if (a.csv) {
    std::ofstream csv(*a.csv);
    if (!csv) throw UsageError("cannot write " + *a.csv);
    csv << "t,empirical,trials,wilson_low,wilson_high,wilson_halfwidth,bound,d,sigma2_hat,exact\n";
    for (const auto& r : rows) {
      csv << kwm::format_number(r.t) << ',' << kwm::format_number(r.empirical) << ',' << r.trials << ','
          << kwm::format_number(r.wilson_low) << ',' << kwm::format_number(r.wilson_high) << ','
          << kwm::format_number(r.wilson_halfwidth) << ',' << kwm::format_number(r.bound) << ',' << r.d << ','
          << kwm::format_number(r.sigma2_hat) << ',' << (r.exact ? "true" : "false") << '\n';
    }
  }
  emit(out);
  return exit_ok;
}

// sweep ---------------------------------------------------------------------

/// "a:b:s" range or "v1,v2,..." list of integers.
std::vector<long> parse_int_axis(const std::string& key, const std::string& text) {
  std::vector<long> out;
  auto to_long = [&key](const std::string& s) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(s, &used);
    } catch (const std::exception&) {
      throw UsageError("--grid: bad integer '" + s + "' in " + key);
    }
    if (used != s.size()) throw UsageError("--grid: bad integer '" + s + "' in " + key);
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 2 && parts.size() != 3) throw UsageError("--grid: range must be a:b or a:b:s in " + key);
    const long lo = to_long(parts[0]), hi = to_long(parts[1]);
    const long step = parts.size() == 3 ? to_long(parts[2]) : 1;
    if (step <= 0) throw UsageError("--grid: range step must be positive in " + key);
    for (long v = lo; v <= hi; v += step) out.push_back(v);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(to_long(item));
    }
  }
  return out;
}

/// "n=1,2,4;d=2:16:2;sigma2-log2=-20:0:1".
kwm::BoundGrid parse_grid(const std::string& text) {
  kwm::BoundGrid g;
  std::map<std::string, std::vector<long>> axes;
  std::stringstream ss(text);
  std::string clause;
  while (std::getline(ss, clause, ';')) {
    if (clause.empty()) continue;
    const auto eq = clause.find('=');
    if (eq == std::string::npos) throw UsageError("--grid: clause '" + clause + "' lacks '='");
    const std::string key = clause.substr(0, eq);
    if (key != "n" && key != "d" && key != "sigma2-log2") throw UsageError("--grid: unknown axis '" + key + "'");
    axes[key] = parse_int_axis(key, clause.substr(eq + 1));
  }
  for (const char* key : {"n", "d", "sigma2-log2"}) {
    if (axes[key].empty()) throw UsageError(std::string("--grid: axis '") + key + "' is empty");
  }
  for (long n : axes["n"]) {
    if (n < 1) throw UsageError("--grid: n must be >= 1");
    g.ns.push_back(n);
  }
  for (long d : axes["d"]) {
    if (d < 2 || d % 2 != 0) throw UsageError("--grid: d values must be even and >= 2");
    g.ds.push_back(d);
  }
  for (long e : axes["sigma2-log2"]) {
    if (e > 0 || e < -60) throw UsageError("--grid: sigma2-log2 values must lie in [-60, 0]");
    g.log2_sigma2.push_back(static_cast<int>(e));
  }
  return g;
}

struct SweepArgs {
  std::string grid;
  std::string out = ".";
  int samples = 400;
};

int cmd_sweep(const SweepArgs& a) {
  const kwm::BoundGrid g = parse_grid(a.grid);
  if (a.samples < 10) throw UsageError("--samples must be >= 10");
  std::filesystem::create_directories(a.out);
  auto open = [&a](const char* name, const char* comment, const char* header) {
    const auto path = std::filesystem::path(a.out) / name;
    auto f = std::make_unique<std::ofstream>(path);
    if (!*f) throw UsageError("cannot write " + path.string());
    *f << "# " << comment << '\n' << header << '\n';
    return f;
  };
  using kwm::format_number;

  auto surface = open("bound_surface.csv",
                      "bound M (unit constants) and the exact three-point moment norm per grid point; ratio = exact_root/M_unit",
                      "n,d,log2_sigma2,sigma2,regime,M_unit,exact_root,ratio");
  auto bounds = open("regime_boundaries.csv",
                     "sigma2 at which the regime changes for each (n,d): SubGaussian above sigma2_sg_lc, SmallVariance below sigma2_lc_sv",
                     "n,d,sigma2_sg_lc,sigma2_lc_sv");
  std::set<double> as;
  for (long n : g.ns) {
    for (long d : g.ds) {
      const double nd = static_cast<double>(d) / static_cast<double>(n);
      *bounds << n << ',' << d << ',' << format_number(nd * std::exp(-std::max(nd, 2.0))) << ','
              << format_number(nd * std::exp(-static_cast<double>(d))) << '\n';
      for (int e : g.log2_sigma2) {
        const kwm::Rational s2 = kwm::dyadic(e);
        const auto m = kwm::sharp_bound_M(kwm::make_query(n, s2.to_double(), d));
        const double ratio = kwm::exact_to_bound_ratio(n, d, s2);
        *surface << n << ',' << d << ',' << e << ',' << format_number(s2.to_double()) << ',' << kwm::to_string(m.regime)
                 << ',' << format_number(m.value) << ',' << format_number(ratio * m.value) << ','
                 << format_number(ratio) << '\n';
        const double aa = static_cast<double>(n) * s2.to_double() / static_cast<double>(d);
        if (aa < 1.0) as.insert(aa);
      }
    }
  }

  auto gcurve = open("g_curve.csv", "g(q) = a^(1/q)/q sampled on a uniform q grid for each a = n*sigma2/d < 1 of the sweep; peak at q = log(1/a)",
                     "a,q,g,q_peak");
  for (double aa : as) {
    const double peak = std::log(1.0 / aa);
    const double qmax = std::max(4.0, 2.0 * peak);
    const double step = qmax / a.samples;
    for (int i = 1; i <= a.samples; ++i) {
      const double q = step * i;
      *gcurve << format_number(aa) << ',' << format_number(q) << ',' << format_number(kwm::aux_g(q, aa)) << ','
              << format_number(peak) << '\n';
    }
  }

  auto schmidt = open("schmidt_curve.csv",
                      "rewritten Schmidt bound cosh(sqrt(d/(36C)))*sqrt(dC) against C on a uniform grid of 36C/d in (0, 3]",
                      "d,C,C_scaled,bound,C_star");
  for (long d : g.ds) {
    const double cstar = kwm::schmidt_find_Cstar(d).C;
    for (int i = 1; i <= a.samples; ++i) {
      const double scaled = 3.0 * i / a.samples;
      const double C = scaled * static_cast<double>(d) / 36.0;
      *schmidt << d << ',' << format_number(C) << ',' << format_number(scaled) << ','
               << format_number(kwm::schmidt_rewritten(d, C)) << ',' << format_number(cstar) << '\n';
    }
  }
  emit({{"out", a.out},
        {"grid", g.describe()},
        {"files", {"bound_surface.csv", "regime_boundaries.csv", "g_curve.csv", "schmidt_curve.csv"}}});
  return exit_ok;
}

// calibrate -----------------------------------------------------------------

struct CalibrateArgs {
  std::optional<std::string> out;
  std::optional<std::string> date;
};

std::string today_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", std::gmtime(&now));
  return buf;
}

int cmd_calibrate(const CalibrateArgs& a) {
  const kwm::BoundGrid grid = kwm::acceptance_grid();
  const kwm::CalibrationFit fit = kwm::fit_calibration(grid);
  kwm::CalibrationFile f;
  f.constants = fit.constants;
  f.grid = grid.describe() + "corner=d>2n";
  f.grid_hash = grid.hash();
  f.date = a.date.value_or(today_utc());
  f.corner_excluded = true;
  const std::string path = a.out.value_or(default_calibration_path());
  kwm::save_calibration(f, path);
  json out = kwm::to_json(f);
  out["path"] = path;
  for (kwm::Regime r : kwm::all_regimes) {
    const auto& s = fit.stats[static_cast<std::size_t>(r)];
    out["fit_ranges"][std::string(kwm::to_string(r))] = {{"min", s.min}, {"max", s.max}, {"count", s.count}};
  }
  emit(out);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kwm: moment and tail bounds for sums of k-wise independent bounded variables"};
  app.require_subcommand(1);
  std::function<int()> action;

  BoundArgs bound;
  auto* b = app.add_subcommand("bound", "Sharp moment bound M(n, sigma2, d) and its regime");
  b->add_option("--n", bound.n, "number of summands")->required();
  b->add_option("--sigma2", bound.sigma2, "average variance in (0,1], decimal or num/den")->required();
  b->add_option("--d", bound.d, "even moment order")->required();
  b->add_option("--k", bound.k, "independence order (default d)");
  b->add_option("--t", bound.t, "also report the tail bound at t");
  b->add_option("--mode", bound.mode, "constant mode")->check(CLI::IsMember({"unit", "calibrated"}));
  b->callback([&] { action = [&] { return cmd_bound(bound); }; });

  ExactArgs exact;
  auto* e = app.add_subcommand("exact", "Exact even moment of an extreme sum, as a rational");
  e->add_option("--dist", exact.dist, "law family")->required()->check(CLI::IsMember({"threepoint", "het", "symbinom"}));
  e->add_option("--n", exact.n, "number of summands");
  e->add_option("--d", exact.d, "even moment order")->required();
  e->add_option("--sigma2", exact.sigma2, "common variance (threepoint)");
  e->add_option("--sigma2-list", exact.sigma2_list, "comma-separated variances (het)");
  e->add_option("--p", exact.p, "Bernoulli parameter <= 1/2 (symbinom)");
  e->add_option("--digits", exact.digits, "significant digits of the decimals")->check(CLI::Range(1, 200));
  e->callback([&] { action = [&] { return cmd_exact(exact); }; });

  CompareArgs compare;
  auto* c = app.add_subcommand("compare", "All catalogued bounds side by side");
  c->add_option("--n", compare.n, "number of summands")->required();
  c->add_option("--d", compare.d, "even moment order")->required();
  c->add_option("--sigma2", compare.sigma2, "average variance")->required();
  c->add_option("--mu", compare.mu, "mean of [0,1]-valued summands (enables Bellare-Rompel)");
  c->add_option("--csv", compare.csv, "also write the row as CSV to this file");
  c->callback([&] { action = [&] { return cmd_compare(compare); }; });

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Run a property suite against the exact oracles");
  v->add_option("--suite", verify.suite, "suite name")
      ->required()
      ->check(CLI::IsMember({"majorization", "formula", "regimes", "dominance", "symmetrization", "kwise-exact",
                             "preliminaries", "binomial"}));
  v->add_option("--seed", verify.seed, "64-bit seed");
  v->add_option("--cases", verify.cases, "number of random cases");
  v->add_flag("--include-corner", verify.include_corner, "regimes: also check the d > 2n corner");
  v->callback([&] { action = [&] { return cmd_verify(verify); }; });

  SimulateArgs simulate;
  auto* s = app.add_subcommand("simulate", "Tail estimates for a k-wise independent family");
  s->add_option("--config", simulate.config, "experiment config JSON")->required();
  s->add_option("--csv", simulate.csv, "also write rows as CSV");
  s->callback([&] { action = [&] { return cmd_simulate(simulate); }; });

  SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "Write bound surfaces and curve samples as CSV");
  w->add_option("--grid", sweep.grid, "e.g. \"n=1,2,4;d=2:16:2;sigma2-log2=-20:0:1\"")->required();
  w->add_option("--out", sweep.out, "output directory");
  w->add_option("--samples", sweep.samples, "samples per curve");
  w->callback([&] { action = [&] { return cmd_sweep(sweep); }; });

  CalibrateArgs calibrate;
  auto* k = app.add_subcommand("calibrate", "Refit the calibrated constants and write the calibration file");
  k->add_option("--out", calibrate.out, "output path (default: the active calibration path)");
  k->add_option("--date", calibrate.date, "date stamp to record (default: today, UTC)");
  k->callback([&] { action = [&] { return cmd_calibrate(calibrate); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    std::cerr << "kwm: " << ex.what() << '\n';
    return exit_usage;
  }

  try {
    return action();
  } catch (const UsageError& ex) {
    std::cerr << "kwm: " << ex.what() << '\n';
  } catch (const kwm::ResourceError& ex) {
    std::cerr << "kwm: " << ex.what() << '\n';
  } catch (const std::exception& ex) {
    std::cerr << "kwm: " << ex.what() << '\n';
  }
  return exit_usage;
}
