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

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kwm {

/// Parameters of the moment bound: n summands, average variance sigma2 in
/// (0,1], even moment order d, independence order k with d <= k.
struct BoundQuery {
  long n = 1;
  double sigma2 = 1.0;
  long d = 2;
  long k = 2;

  void validate() const {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(sigma2 > 0.0) || sigma2 > 1.0) throw std::invalid_argument("sigma2 must lie in (0,1]");
    if (d < 2 || d % 2 != 0) throw std::invalid_argument("d must be even");
    if (k < 2) throw std::invalid_argument("k must be >= 2");
    if (d > k) throw std::invalid_argument("d <= k required");
  }

  /// log(d / (n sigma2)), natural log.
  double log_ratio() const {
    return std::log(static_cast<double>(d)) - std::log(static_cast<double>(n)) - std::log(sigma2);
  }
};

/// Query with k defaulted to d, for callers that only care about the moment.
inline BoundQuery make_query(long n, double sigma2, long d) { return BoundQuery{n, sigma2, d, d}; }

enum class Regime { SubGaussian, LogCorrected, SmallVariance };

inline constexpr std::array<Regime, 3> all_regimes{Regime::SubGaussian, Regime::LogCorrected, Regime::SmallVariance};

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::SubGaussian: return "SubGaussian";
    case Regime::LogCorrected: return "LogCorrected";
    case Regime::SmallVariance: return "SmallVariance";
  }
  return "?";
}

inline Regime regime_from_string(std::string_view s) {
  for (Regime r : all_regimes) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown regime '" + std::string(s) + "'");
}

inline std::string_view branch_expression(Regime r) {
  switch (r) {
    case Regime::SubGaussian: return "sqrt(d*n*sigma2)";
    case Regime::LogCorrected: return "d/log(d/(n*sigma2))";
    case Regime::SmallVariance: return "(n*sigma2)^(1/d)";
  }
  return "?";
}

enum class ConstantMode { unit, calibrated };

inline std::string_view to_string(ConstantMode m) { return m == ConstantMode::unit ? "unit" : "calibrated"; }

/// Regime from L = log(d/(n sigma2)): SubGaussian when L < max(d/n, 2),
/// SmallVariance when L > d, LogCorrected otherwise (ties included).
inline Regime classify_regime(const BoundQuery& q) {
  q.validate();
  const double L = q.log_ratio();
  const double lower = std::max(static_cast<double>(q.d) / static_cast<double>(q.n), 2.0);
  if (L < lower) return Regime::SubGaussian;
  if (L <= static_cast<double>(q.d)) return Regime::LogCorrected;
  return Regime::SmallVariance;
}

/// The branch formula of `r` evaluated at q, whatever regime q falls in.
inline double branch_value(Regime r, const BoundQuery& q) {
  const double n = static_cast<double>(q.n), d = static_cast<double>(q.d);
  switch (r) {
    case Regime::SubGaussian: return std::sqrt(d * n * q.sigma2);
    case Regime::LogCorrected: return d / q.log_ratio();
    case Regime::SmallVariance: return std::exp((std::log(n) + std::log(q.sigma2)) / d);
  }
  return 0.0;
}

/// Per-regime multiplicative constants for calibrated mode.
struct CalibrationConstants {
  double sub_gaussian = 1.0;
  double log_corrected = 1.0;
  double small_variance = 1.0;

  double operator[](Regime r) const {
    switch (r) {
      case Regime::SubGaussian: return sub_gaussian;
      case Regime::LogCorrected: return log_corrected;
      case Regime::SmallVariance: return small_variance;
    }
    return 1.0;
  }
  double& operator[](Regime r) {
    switch (r) {
      case Regime::SubGaussian: return sub_gaussian;
      case Regime::LogCorrected: return log_corrected;
      case Regime::SmallVariance: break;
    }
    return small_variance;
  }
};

struct BoundResult {
  double value = 0.0;
  Regime regime = Regime::SubGaussian;
  std::string branch_expression;
  ConstantMode constant_mode = ConstantMode::unit;
};

/// M(n, sigma2, d) with constant 1.
inline BoundResult sharp_bound_M(const BoundQuery& q) {
  const Regime r = classify_regime(q);
  return {branch_value(r, q), r, std::string(branch_expression(r)), ConstantMode::unit};
}

/// M(n, sigma2, d) scaled by the calibrated constant of its regime.
inline BoundResult sharp_bound_M(const BoundQuery& q, const CalibrationConstants& constants) {
  BoundResult out = sharp_bound_M(q);
  out.value *= constants[out.regime];
  out.constant_mode = ConstantMode::calibrated;
  return out;
}

struct DiscreteMaxResult {
  double value = 0.0;
  long argmax = 1;
};

/// max over l in [1, min(d/2, n)] of [l^d C(n,l) sigma2^l]^{1/d}, accumulated
/// in the log domain.
inline DiscreteMaxResult discrete_max_bound(const BoundQuery& q) {
  q.validate();
  const long top = std::min(q.d / 2, q.n);
  const double d = static_cast<double>(q.d);
  const double log_s2 = std::log(q.sigma2);
  double best = -INFINITY;
  long arg = 1;
  for (long l = 1; l <= top; ++l) {
    const double log_binom = std::lgamma(static_cast<double>(q.n) + 1.0) - std::lgamma(static_cast<double>(l) + 1.0) -
                             std::lgamma(static_cast<double>(q.n - l) + 1.0);
    const double term = d * std::log(static_cast<double>(l)) + log_binom + static_cast<double>(l) * log_s2;
    if (term > best) {
      best = term;
      arg = l;
    }
  }
  return {std::exp(best / d), arg};
}

/// g(q) = a^{1/q} / q.
inline double aux_g(double q, double a) { return std::pow(a, 1.0 / q) / q; }

struct ContinuousMaxResult {
  double value = 0.0;
  double q = 0.0;
};

/// max of (d/q) a^{1/q}, a = n sigma2 / d, over q in [max(2, d/n), d].
/// g is decreasing for a >= 1 and peaks at q = log(1/a) for a < 1, so the
/// maximizer is that stationary point clamped to the interval.
inline ContinuousMaxResult continuous_relaxation_max(const BoundQuery& q) {
  q.validate();
  const double d = static_cast<double>(q.d);
  const double a = static_cast<double>(q.n) * q.sigma2 / d;
  const double lo = std::max(2.0, d / static_cast<double>(q.n));
  const double hi = d;
  double qq = lo;
  if (a < 1.0) qq = std::clamp(std::log(1.0 / a), lo, hi);
  return {d * aux_g(qq, a), qq};
}

/// min(1, (c M / t)^d) with the unit-mode M.
inline double tail_bound(const BoundQuery& q, double t, double c) {
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  const double m = sharp_bound_M(q).value;
  const double log_ratio = std::log(c * m) - std::log(t);
  if (log_ratio >= 0.0) return 1.0;
  return std::exp(static_cast<double>(q.d) * log_ratio);
}

/// Unclamped (c M / t)^d, for homogeneity checks.
inline double tail_bound_unclamped(const BoundQuery& q, double t, double c) {
  const double m = sharp_bound_M(q).value;
  return std::exp(static_cast<double>(q.d) * (std::log(c * m) - std::log(t)));
}

}  // namespace kwm
