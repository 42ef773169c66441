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

#pragma once

#include <kwm/sharp_bounds.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kwm {

/// Parameters shared by the competing bounds. `mu` is the mean parameter of
/// [0,1]-valued summands and is only needed by Bellare-Rompel.
struct BaselineQuery {
  long n = 1;
  long d = 2;
  double sigma2 = 1.0;
  std::optional<double> mu;

  void validate() const {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (d < 2 || d % 2 != 0) throw std::invalid_argument("d must be even");
    if (!(sigma2 > 0.0) || sigma2 > 1.0) throw std::invalid_argument("sigma2 must lie in (0,1]");
    if (mu) {
      if (*mu < 0.0 || *mu > 1.0) throw std::invalid_argument("mu must lie in [0,1]");
      if (sigma2 > *mu) throw std::invalid_argument("sigma2 <= mu required for [0,1]-valued summands");
    }
  }

  double variance_sum() const { return static_cast<double>(n) * sigma2; }
};

namespace detail {

/// log cosh(x) without overflow.
inline double log_cosh(double x) {
  x = std::fabs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
}

}  // namespace detail

/// d-th root of sqrt(2) cosh(sqrt(d^3/(36C))) (dC/e)^{d/2}, valid for C >= n sigma2.
inline double schmidt_raw(const BaselineQuery& q, double C) {
  q.validate();
  if (!(C >= q.variance_sum())) throw std::invalid_argument("schmidt_raw needs C >= n*sigma2");
  const double d = static_cast<double>(q.d);
  const double log_value = 0.5 * std::numbers::ln2 + detail::log_cosh(std::sqrt(d * d * d / (36.0 * C))) +
                           0.5 * d * (std::log(d * C) - 1.0);
  return std::exp(log_value / d);
}

/// cosh(sqrt(d/(36C))) sqrt(dC), the bound above up to a constant factor.
inline double schmidt_rewritten(long d, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("C must be positive");
  const double dd = static_cast<double>(d);
  return std::exp(detail::log_cosh(std::sqrt(dd / (36.0 * C))) + 0.5 * std::log(dd * C));
}

struct CStar {
  double C = 0.0;
  double t = 0.0;  // t = sqrt(d/(36C)), the root of tanh(t) = 1/t
};

/// Minimizer of schmidt_rewritten over C > 0. With t = sqrt(d/(36C)) the
/// objective is proportional to cosh(t)/t, stationary where t tanh(t) = 1;
/// solved by bisection on [1, 2].
inline CStar schmidt_find_Cstar(long d) {
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  auto f = [](double t) { return std::tanh(t) - 1.0 / t; };
  double lo = 1.0, hi = 2.0;
  if (!(f(lo) < 0.0 && f(hi) > 0.0)) throw std::logic_error("tanh(t) = 1/t is not bracketed by [1, 2]");
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::fabs(fm) <= 1e-12 && hi - lo < 1e-12) break;
    (fm < 0.0 ? lo : hi) = mid;
  }
  return {static_cast<double>(d) / (36.0 * mid * mid), mid};
}

struct SchmidtOptimized {
  double bound = 0.0;  // schmidt_rewritten at C_used
  double C_used = 0.0;
  double proxy = 0.0;  // max(sqrt(d n sigma2), d)
};

/// Rewritten Schmidt bound at C = max(C*, n sigma2).
inline SchmidtOptimized schmidt_optimized(const BaselineQuery& q) {
  q.validate();
  const double C = std::max(schmidt_find_Cstar(q.d).C, q.variance_sum());
  const double d = static_cast<double>(q.d);
  return {schmidt_rewritten(q.d, C), C, std::max(std::sqrt(d * q.variance_sum()), d)};
}

/// min(sqrt(dn), sqrt(dn mu + d^2)).
inline double bellare_rompel(const BaselineQuery& q) {
  q.validate();
  if (!q.mu) throw std::invalid_argument("bellare_rompel needs mu");
  const double d = static_cast<double>(q.d), n = static_cast<double>(q.n);
  return std::min(std::sqrt(d * n), std::sqrt(d * n * *q.mu + d * d));
}

/// max(sqrt(n d sigma2), d).
inline double bernstein_moment(const BaselineQuery& q) {
  q.validate();
  const double d = static_cast<double>(q.d);
  return std::max(std::sqrt(d * q.variance_sum()), d);
}

/// d (sum E|X_i - EX_i|^d)^{1/d} + sqrt(d n sigma2). Without per-summand
/// moments the bounded-case domination E|X_i - EX_i|^d <= sigma_i^2 is used.
inline double rosenthal_moment(const BaselineQuery& q, std::optional<std::span<const double>> dth_abs_moments = {}) {
  q.validate();
  const double d = static_cast<double>(q.d);
  double sum_d = q.variance_sum();
  if (dth_abs_moments) {
    if (dth_abs_moments->size() != static_cast<std::size_t>(q.n)) {
      throw std::invalid_argument("rosenthal_moment needs one d-th moment per summand");
    }
    sum_d = 0.0;
    for (double m : *dth_abs_moments) {
      if (m < 0.0) throw std::invalid_argument("moments must be non-negative");
      sum_d += m;
    }
  }
  return d * std::pow(sum_d, 1.0 / d) + std::sqrt(d * q.variance_sum());
}

/// The closed form the Rosenthal bound further reduces to.
inline double rosenthal_simplified(const BaselineQuery& q) { return bernstein_moment(q); }

/// One row of the comparison table. Absent entries are bounds that could not
/// be evaluated for this query.
struct ComparisonRow {
  BaselineQuery query;
  std::optional<double> ours;
  std::optional<double> schmidt_raw;
  std::optional<double> schmidt_opt;
  std::optional<double> bellare;
  std::optional<double> bernstein;
  std::optional<double> rosenthal;
  std::string regime;
  std::string best;
};

/// Evaluates every catalogued bound. `best` ranks the constant-free columns
/// (ours, schmidt_opt, bellare, bernstein, rosenthal); schmidt_raw keeps its
/// explicit constants and is reported for reference only. Ties go to the
/// earlier column.
inline ComparisonRow compare_all(const BaselineQuery& q) {
  q.validate();
  ComparisonRow row;
  row.query = q;
  auto attempt = [](auto&& fn) -> std::optional<double> {
    try {
      const double v = fn();
      if (std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    return std::nullopt;
  };
  const BoundQuery bq = make_query(q.n, q.sigma2, q.d);
  row.ours = attempt([&] { return sharp_bound_M(bq).value; });
  row.regime = std::string(to_string(classify_regime(bq)));
  const SchmidtOptimized opt = schmidt_optimized(q);
  row.schmidt_raw = attempt([&] { return schmidt_raw(q, opt.C_used); });
  row.schmidt_opt = opt.proxy;
  if (q.mu) row.bellare = attempt([&] { return bellare_rompel(q); });
  row.bernstein = attempt([&] { return bernstein_moment(q); });
  row.rosenthal = attempt([&] { return rosenthal_moment(q); });

  const std::pair<const char*, const std::optional<double>*> ranked[] = {
      {"ours", &row.ours},           {"schmidt_opt", &row.schmidt_opt}, {"bellare", &row.bellare},
      {"bernstein", &row.bernstein}, {"rosenthal", &row.rosenthal}};
  double best = INFINITY;
  for (const auto& [label, value] : ranked) {
    if (*value && **value < best) {
      best = **value;
      row.best = label;
    }
  }
  return row;
}

inline constexpr const char* comparison_csv_header = "n,d,sigma2,mu,ours,schmidt_raw,schmidt_opt,bellare,bernstein,rosenthal,best";

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv_line(const ComparisonRow& row) {
  auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  std::string out = std::to_string(row.query.n) + "," + std::to_string(row.query.d) + "," +
                    format_number(row.query.sigma2) + "," + cell(row.query.mu);
  for (const auto* v : {&row.ours, &row.schmidt_raw, &row.schmidt_opt, &row.bellare, &row.bernstein, &row.rosenthal}) {
    out += "," + cell(*v);
  }
  return out + "," + row.best;
}

inline nlohmann::json to_json(const ComparisonRow& row) {
  nlohmann::json j;
  j["n"] = row.query.n;
  j["d"] = row.query.d;
  j["sigma2"] = row.query.sigma2;
  auto put = [&j](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("mu", row.query.mu);
  put("ours", row.ours);
  put("schmidt_raw", row.schmidt_raw);
  put("schmidt_opt", row.schmidt_opt);
  put("bellare", row.bellare);
  put("bernstein", row.bernstein);
  put("rosenthal", row.rosenthal);
  j["regime"] = row.regime;
  j["best"] = row.best;
  return j;
}

}  // namespace kwm
