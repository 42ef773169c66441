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

#include <kwm/distributions.hpp>
#include <kwm/random.hpp>
#include <kwm/rational.hpp>
#include <kwm/sharp_bounds.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kwm {

inline bool is_prime(long p) {
  if (p < 2) return false;
  for (long f = 2; f * f <= p; ++f) {
    if (p % f == 0) return false;
  }
  return true;
}

/// Degree-(k-1) polynomials over GF(p), evaluated at positions 1..n and mapped
/// to {-1, 0, +1} by thresholds. Any k positions see independent uniform field
/// values, hence independent symbols.
struct KWiseFamily {
  long p = 2;
  long k = 2;
  long n = 1;
  long m_neg = 0;
  long m_pos = 0;
  double sigma2_requested = 0.0;

  /// h < m_neg -> -1, h >= p - m_pos -> +1, otherwise 0.
  int symbol(long h) const {
    if (h < m_neg) return -1;
    if (h >= p - m_pos) return 1;
    return 0;
  }

  Rational sigma2_hat() const { return Rational(BigInt(m_neg + m_pos), BigInt(p)); }
  double quantization_error() const { return std::fabs(sigma2_hat().to_double() - sigma2_requested); }

  /// Law of a single symbol.
  DiscretePMF marginal() const {
    return DiscretePMF({{Rational(-1), Rational(BigInt(m_neg), BigInt(p))},
                        {Rational(0), Rational(BigInt(p - m_neg - m_pos), BigInt(p))},
                        {Rational(1), Rational(BigInt(m_pos), BigInt(p))}});
  }

  /// The bound's query at the quantized variance and the largest even d <= k.
  BoundQuery bound_query() const { return {n, sigma2_hat().to_double(), (k / 2) * 2, k}; }
};

/// Symmetric thresholds m = round(p sigma2 / 2), capped at floor(p/2).
inline KWiseFamily build_family(long n, long k, double sigma2, long p) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(sigma2 > 0.0) || sigma2 > 1.0) throw std::invalid_argument("sigma2 must lie in (0,1]");
  if (!is_prime(p)) throw std::invalid_argument("p = " + std::to_string(p) + " is not prime");
  if (p < n) throw std::invalid_argument("p must be >= n");
  if (p > (1L << 31)) throw std::invalid_argument("p must be below 2^31");
  const long m = std::min(std::lround(static_cast<double>(p) * sigma2 / 2.0), p / 2);
  return {p, k, n, m, m, sigma2};
}

namespace detail {

/// pow_table[i * k + j] = (i+1)^j mod p for positions i = 0..n-1.
inline std::vector<std::uint64_t> position_powers(const KWiseFamily& f) {
  std::vector<std::uint64_t> t(static_cast<std::size_t>(f.n * f.k));
  const auto p = static_cast<std::uint64_t>(f.p);
  for (long i = 0; i < f.n; ++i) {
    std::uint64_t x = static_cast<std::uint64_t>(i + 1) % p, v = 1 % p;
    for (long j = 0; j < f.k; ++j) {
      t[static_cast<std::size_t>(i * f.k + j)] = v;
      v = v * x % p;
    }
  }
  return t;
}

}  // namespace detail

/// One draw of S for trial `trial` of stream `seed`. Coefficients come from
/// CounterRng(seed, trial), so draws are reproducible and order-free.
inline long sample_sum(const KWiseFamily& f, std::uint64_t seed, std::uint64_t trial = 0) {
  CounterRng rng(seed, trial);
  const auto p = static_cast<std::uint64_t>(f.p);
  std::uint64_t coef[64];
  if (f.k > 64) throw std::invalid_argument("k must be <= 64");
  for (long j = 0; j < f.k; ++j) coef[j] = rng.uniform(p);
  long s = 0;
  for (long i = 1; i <= f.n; ++i) {
    const std::uint64_t x = static_cast<std::uint64_t>(i) % p;
    std::uint64_t h = 0;
    for (long j = f.k - 1; j >= 0; --j) h = (h * x + coef[j]) % p;
    s += f.symbol(static_cast<long>(h));
  }
  return s;
}

/// counts[s + n] = number of trials with S = s.
inline std::vector<std::uint64_t> simulate_histogram(const KWiseFamily& f, std::uint64_t trials, std::uint64_t seed) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(2 * f.n + 1), 0);
  for (std::uint64_t t = 0; t < trials; ++t) ++counts[static_cast<std::size_t>(sample_sum(f, seed, t) + f.n)];
  return counts;
}

struct WilsonInterval {
  double low = 0.0;
  double high = 0.0;
  double halfwidth() const { return 0.5 * (high - low); }
};

/// 95% Wilson score interval for `successes` out of `trials`.
inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  constexpr double z = 1.959963984540054;
  const double N = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / N;
  const double denom = 1.0 + z * z / N;
  const double center = (ph + z * z / (2.0 * N)) / denom;
  const double half = z / denom * std::sqrt(ph * (1.0 - ph) / N + z * z / (4.0 * N * N));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct TailEstimate {
  double t = 0.0;
  double empirical = 0.0;
  std::uint64_t trials = 0;
  double wilson_low = 0.0;
  double wilson_high = 0.0;
  double wilson_halfwidth = 0.0;
  double bound = 1.0;
  long d = 2;
  double sigma2_hat = 0.0;
  bool exact = false;
  std::optional<Rational> exact_value;  // set in exhaustive mode
};

namespace detail {

inline double family_tail_bound(const KWiseFamily& f, double t, double c) {
  if (f.m_neg + f.m_pos == 0) return 0.0;  // S = 0 surely
  return tail_bound(f.bound_query(), t, c);
}

inline TailEstimate tail_from_histogram(const KWiseFamily& f, const std::vector<std::uint64_t>& counts,
                                        std::uint64_t trials, double t, double c) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be non-negative");
  std::uint64_t above = 0;
  for (long s = -f.n; s <= f.n; ++s) {
    if (std::fabs(static_cast<double>(s)) > t) above += counts[static_cast<std::size_t>(s + f.n)];
  }
  TailEstimate e;
  e.t = t;
  e.trials = trials;
  e.empirical = static_cast<double>(above) / static_cast<double>(trials);
  const WilsonInterval w = wilson_interval(above, trials);
  e.wilson_low = w.low;
  e.wilson_high = w.high;
  e.wilson_halfwidth = w.halfwidth();
  e.d = f.bound_query().d;
  e.sigma2_hat = f.sigma2_hat().to_double();
  e.bound = t > 0.0 ? family_tail_bound(f, t, c) : 1.0;
  return e;
}

}  // namespace detail

inline constexpr std::uint64_t min_tail_trials = 10'000;

/// Pr[|S| > t] over `trials` draws (E S = 0 by symmetric thresholds), with
/// Wilson interval and the bound min(1, (cM/t)^d) at sigma2_hat.
inline std::vector<TailEstimate> empirical_tails(const KWiseFamily& f, const std::vector<double>& ts,
                                                 std::uint64_t trials, std::uint64_t seed, double c = 1.0) {
  if (trials < min_tail_trials) throw std::invalid_argument("trials must be >= 10000");
  const auto counts = simulate_histogram(f, trials, seed);
  std::vector<TailEstimate> out;
  for (double t : ts) out.push_back(detail::tail_from_histogram(f, counts, trials, t, c));
  return out;
}

inline TailEstimate empirical_tail(const KWiseFamily& f, double t, std::uint64_t trials, std::uint64_t seed,
                                   double c = 1.0) {
  return empirical_tails(f, {t}, trials, seed, c).front();
}

struct MomentEstimate {
  long d = 2;
  double moment = 0.0;          // mean of S^d
  double norm = 0.0;            // moment^{1/d}
  double standard_error = 0.0;  // bootstrap SE of norm
  std::uint64_t trials = 0;
};

/// Monte Carlo ||S||_d with a bootstrap standard error. Only d <= k is
/// accepted: beyond order k the family no longer matches independence.
inline MomentEstimate empirical_moment(const KWiseFamily& f, long d, std::uint64_t trials, std::uint64_t seed,
                                       int bootstrap_reps = 100) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("d must be even");
  if (d > f.k) throw std::invalid_argument("d <= k required");
  if (trials < 2) throw std::invalid_argument("trials must be >= 2");
  const auto counts = simulate_histogram(f, trials, seed);
  std::vector<double> powers(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) powers[i] = std::pow(static_cast<double>(i) - f.n, d);
  // Sorted sample as a cumulative table for resampling.
  std::vector<std::uint64_t> cumulative(counts.size());
  std::uint64_t acc = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    acc += counts[i];
    cumulative[i] = acc;
    total += static_cast<double>(counts[i]) * powers[i];
  }
  MomentEstimate e;
  e.d = d;
  e.trials = trials;
  e.moment = total / static_cast<double>(trials);
  e.norm = std::pow(e.moment, 1.0 / static_cast<double>(d));

  CounterRng boot(seed ^ 0xb0075742ull, 1);
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < bootstrap_reps; ++r) {
    double m = 0.0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const std::uint64_t u = boot.uniform(trials);
      const auto idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      m += powers[idx];
    }
    const double norm = std::pow(m / static_cast<double>(trials), 1.0 / static_cast<double>(d));
    sum += norm;
    sum_sq += norm * norm;
  }
  if (bootstrap_reps > 1) {
    const double R = bootstrap_reps;
    e.standard_error = std::sqrt(std::max(0.0, (sum_sq - sum * sum / R) / (R - 1.0)));
  }
  return e;
}

// Exhaustive enumeration ----------------------------------------------------

inline constexpr std::uint64_t exhaustive_limit = 1'000'000;

/// p^k, or nullopt when it exceeds `limit`.
inline std::optional<std::uint64_t> seed_space_size(long p, long k, std::uint64_t limit = exhaustive_limit) {
  std::uint64_t s = 1;
  for (long j = 0; j < k; ++j) {
    s *= static_cast<std::uint64_t>(p);
    if (s > limit) return std::nullopt;
  }
  return s;
}

namespace detail {

/// Visits every coefficient vector in odometer order, keeping the evaluations
/// at the selected positions current: bumping coefficient j (including a wrap
/// p-1 -> 0) adds x^j to every value, mod p.
template <typename Visit>
void enumerate_polynomials(const KWiseFamily& f, const std::vector<long>& positions, Visit&& visit) {
  const auto p = static_cast<std::uint64_t>(f.p);
  const std::size_t m = positions.size();
  const auto powers = position_powers(f);
  std::vector<std::uint64_t> values(m, 0);
  std::vector<long> digits(static_cast<std::size_t>(f.k), 0);
  for (;;) {
    visit(values);
    long j = 0;
    for (; j < f.k; ++j) {
      for (std::size_t i = 0; i < m; ++i) {
        values[i] += powers[static_cast<std::size_t>(positions[i] * f.k + j)];
        if (values[i] >= p) values[i] -= p;
      }
      if (++digits[static_cast<std::size_t>(j)] < f.p) break;
      digits[static_cast<std::size_t>(j)] = 0;
    }
    if (j == f.k) return;
  }
}

inline std::vector<long> all_positions(const KWiseFamily& f) {
  std::vector<long> v(static_cast<std::size_t>(f.n));
  for (long i = 0; i < f.n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

}  // namespace detail

/// Exact law of S over all p^k seeds: counts[s + n].
inline std::vector<std::uint64_t> exhaustive_histogram(const KWiseFamily& f) {
  if (!seed_space_size(f.p, f.k)) throw std::invalid_argument("p^k exceeds the exhaustive limit of 10^6");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(2 * f.n + 1), 0);
  detail::enumerate_polynomials(f, detail::all_positions(f), [&](const std::vector<std::uint64_t>& values) {
    long s = 0;
    for (std::uint64_t h : values) s += f.symbol(static_cast<long>(h));
    ++counts[static_cast<std::size_t>(s + f.n)];
  });
  return counts;
}

/// E S^d averaged over every seed, exact.
inline Rational exhaustive_moment(const KWiseFamily& f, long d, const std::vector<std::uint64_t>& counts) {
  if (d < 1) throw std::invalid_argument("d must be positive");
  Rational total = 0;
  std::uint64_t seeds = 0;
  for (long s = -f.n; s <= f.n; ++s) {
    const std::uint64_t c = counts[static_cast<std::size_t>(s + f.n)];
    if (c == 0) continue;
    seeds += c;
    total += Rational(static_cast<unsigned long>(c)) * Rational(s).pow(static_cast<unsigned>(d));
  }
  return total / Rational(static_cast<unsigned long>(seeds));
}

inline Rational exhaustive_moment(const KWiseFamily& f, long d) { return exhaustive_moment(f, d, exhaustive_histogram(f)); }

/// Pr[|S| > t] over every seed, exact.
inline Rational exhaustive_tail(const KWiseFamily& f, double t, const std::vector<std::uint64_t>& counts) {
  std::uint64_t above = 0, seeds = 0;
  for (long s = -f.n; s <= f.n; ++s) {
    const std::uint64_t c = counts[static_cast<std::size_t>(s + f.n)];
    seeds += c;
    if (std::fabs(static_cast<double>(s)) > t) above += c;
  }
  return Rational(BigInt(static_cast<unsigned long>(above)), BigInt(static_cast<unsigned long>(seeds)));
}

/// Exhaustive-mode TailEstimate: the exact probability, zero-width interval.
inline TailEstimate exhaustive_tail_estimate(const KWiseFamily& f, double t, const std::vector<std::uint64_t>& counts,
                                             double c = 1.0) {
  TailEstimate e;
  e.t = t;
  e.exact = true;
  e.exact_value = exhaustive_tail(f, t, counts);
  e.empirical = e.exact_value->to_double();
  e.trials = *seed_space_size(f.p, f.k);
  e.wilson_low = e.wilson_high = e.empirical;
  e.d = f.bound_query().d;
  e.sigma2_hat = f.sigma2_hat().to_double();
  e.bound = t > 0.0 ? detail::family_tail_bound(f, t, c) : 1.0;
  return e;
}

struct UniformityReport {
  long subsets_checked = 0;
  std::uint64_t tuples = 0;  // p^k value tuples per subset
  bool uniform = true;
  std::vector<long> first_bad_subset;
};

/// For every k-subset of positions, counts how often each value tuple in
/// GF(p)^k occurs across all p^k polynomials; uniform iff every count is 1.
inline UniformityReport check_kwise_uniformity(const KWiseFamily& f) {
  const auto size = seed_space_size(f.p, f.k);
  if (!size) throw std::invalid_argument("p^k exceeds the exhaustive limit of 10^6");
  if (f.k > f.n) throw std::invalid_argument("uniformity check needs k <= n");
  UniformityReport rep;
  rep.tuples = *size;
  std::vector<std::uint32_t> hits(*size);
  std::vector<long> subset(static_cast<std::size_t>(f.k));
  for (long i = 0; i < f.k; ++i) subset[static_cast<std::size_t>(i)] = i;
  const auto p = static_cast<std::uint64_t>(f.p);
  for (;;) {
    std::fill(hits.begin(), hits.end(), 0u);
    detail::enumerate_polynomials(f, subset, [&](const std::vector<std::uint64_t>& values) {
      std::uint64_t idx = 0;
      for (std::uint64_t v : values) idx = idx * p + v;
      ++hits[idx];
    });
    ++rep.subsets_checked;
    if (std::any_of(hits.begin(), hits.end(), [](std::uint32_t h) { return h != 1; })) {
      rep.uniform = false;
      rep.first_bad_subset = subset;
      return rep;
    }
    // Next subset in lexicographic order.
    long i = f.k - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == f.n - f.k + i) --i;
    if (i < 0) return rep;
    ++subset[static_cast<std::size_t>(i)];
    for (long j = i + 1; j < f.k; ++j) subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
}

inline nlohmann::json to_json(const TailEstimate& e) {
  nlohmann::json j{{"t", e.t},
                   {"empirical", e.empirical},
                   {"trials", e.trials},
                   {"wilson_low", e.wilson_low},
                   {"wilson_high", e.wilson_high},
                   {"wilson_halfwidth", e.wilson_halfwidth},
                   {"bound", e.bound},
                   {"d", e.d},
                   {"sigma2_hat", e.sigma2_hat},
                   {"exact", e.exact}};
  if (e.exact_value) j["exact_value"] = e.exact_value->to_string();
  return j;
}

}  // namespace kwm
