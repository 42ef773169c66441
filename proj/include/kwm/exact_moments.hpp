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

#include <kwm/combinatorics.hpp>
#include <kwm/rational.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kwm {

/// n summands, even order d >= 2, common variance sigma2 in [0,1].
struct MomentQuery {
  long n = 1;
  long d = 2;
  Rational sigma2 = 0;

  void validate() const {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (d < 2 || d % 2 != 0) throw std::invalid_argument("d must be even and >= 2");
    if (sigma2 < Rational(0) || sigma2 > Rational(1)) throw std::invalid_argument("sigma2 must lie in [0,1]");
  }
};

/// Per-summand variances, even order d.
struct HeterogeneousQuery {
  long d = 2;
  std::vector<Rational> sigma2s;

  void validate() const {
    if (d < 2 || d % 2 != 0) throw std::invalid_argument("d must be even and >= 2");
    if (sigma2s.empty()) throw std::invalid_argument("need at least one variance");
    for (const auto& s : sigma2s) {
      if (s < Rational(0) || s > Rational(1)) throw std::invalid_argument("each sigma2 must lie in [0,1]");
    }
  }
};

namespace detail {

/// Row F(d, 1..d/2) for one d. Built with a DP over (parts, half-degree):
/// T[p][r] = sum_{j=1..r} T[p-1][r-j] / (2j)!, then F(d, l) = d! * T[l][d/2].
inline std::vector<BigInt> composition_row(long d) {
  const long h = d / 2;
  std::vector<Rational> inv_even_fact(static_cast<std::size_t>(h + 1));
  for (long j = 1; j <= h; ++j) inv_even_fact[static_cast<std::size_t>(j)] = Rational(BigInt(1), factorial(2 * j));

  std::vector<Rational> prev(static_cast<std::size_t>(h + 1), Rational(0));
  prev[0] = 1;
  const BigInt dfact = factorial(d);
  std::vector<BigInt> row(static_cast<std::size_t>(h + 1), BigInt(0));
  for (long parts = 1; parts <= h; ++parts) {
    std::vector<Rational> cur(static_cast<std::size_t>(h + 1), Rational(0));
    for (long r = parts; r <= h; ++r) {
      Rational acc = 0;
      for (long j = 1; j <= r - (parts - 1); ++j) {
        const auto& below = prev[static_cast<std::size_t>(r - j)];
        if (!below.is_zero()) acc += below * inv_even_fact[static_cast<std::size_t>(j)];
      }
      cur[static_cast<std::size_t>(r)] = std::move(acc);
    }
    const Rational f = cur[static_cast<std::size_t>(h)] * Rational(dfact);
    if (!f.is_integer()) throw std::logic_error("composition sum is not an integer");
    row[static_cast<std::size_t>(parts)] = f.numerator();
    prev = std::move(cur);
  }
  return row;
}

class CompositionCache {
 public:
  static CompositionCache& instance() {
    static CompositionCache cache;
    return cache;
  }

  BigInt get(long d, long l) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = rows_.find(d); it != rows_.end()) return it->second[static_cast<std::size_t>(l)];
    }
    auto row = composition_row(d);  // computed outside the lock; last write wins
    BigInt out = row[static_cast<std::size_t>(l)];
    std::lock_guard<std::mutex> lock(mutex_);
    rows_.emplace(d, std::move(row));
    return out;
  }

 private:
  std::mutex mutex_;
  std::map<long, std::vector<BigInt>> rows_;
};

}  // namespace detail

/// F(d, l) = sum over compositions (j_1..j_l) of d/2 with positive parts of
/// d! / prod (2 j_i)!.
inline BigInt composition_sum_F(long d, long l) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("composition_sum_F needs even d >= 2");
  if (l < 1 || l > d / 2) {
    throw std::invalid_argument("composition_sum_F: l=" + std::to_string(l) + " outside [1, d/2]");
  }
  return detail::CompositionCache::instance().get(d, l);
}

/// E (sum of n iid three_point(sigma2))^d = sum_l F(d,l) C(n,l) sigma2^l.
inline Rational exact_moment_iid_threepoint(const MomentQuery& q) {
  q.validate();
  Rational acc = 0;
  Rational power = 1;
  for (long l = 1; l <= q.d / 2; ++l) {
    power *= q.sigma2;
    if (l > q.n) break;
    acc += Rational(composition_sum_F(q.d, l) * binomial(q.n, l)) * power;
  }
  return acc;
}

/// d-th moment of a sum of independent symmetric {-1,0,1} variables with the
/// given variances: sum_l F(d,l) Pi_l(sigma2s). Exact for that family only.
inline Rational exact_moment_het_threepoint(const HeterogeneousQuery& q) {
  q.validate();
  const long top = std::min<long>(q.d / 2, static_cast<long>(q.sigma2s.size()));
  const auto e = elementary_symmetric_all(q.sigma2s, static_cast<std::size_t>(top));
  Rational acc = 0;
  for (long l = 1; l <= top; ++l) acc += Rational(composition_sum_F(q.d, l)) * e[static_cast<std::size_t>(l)];
  return acc;
}

/// Same expression as exact_moment_het_threepoint, read as an upper bound on
/// E(sum Z_i)^d for any independent symmetric Z_i in [-1,1] with variances
/// sigma2s.
inline Rational upper_bound_het(const HeterogeneousQuery& q) { return exact_moment_het_threepoint(q); }

/// E|S - S'|^d for S, S' iid Binom(n, p), p <= 1/2. B - B' is three_point(2p(1-p)).
inline Rational exact_moment_symmetrized_binomial(long n, const Rational& p, long d) {
  if (p < Rational(0) || p > Rational(1, 2)) throw std::invalid_argument("p must lie in [0, 1/2]");
  return exact_moment_iid_threepoint({n, d, Rational(2) * p * (Rational(1) - p)});
}

struct MomentRendering {
  std::string exact;
  std::string decimal;
  std::string dth_root_decimal;
};

/// "num/den", a decimal with `digits` significant digits, and the decimal of
/// the d-th root (the d-norm).
inline MomentRendering render_moment(const Rational& moment, long d, int digits = 12) {
  MomentRendering out{moment.to_string(), moment.to_decimal(digits), "0"};
  if (moment.sign() > 0) {
    const double root = std::exp(moment.log() / static_cast<double>(d));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, root);
    out.dth_root_decimal = buf;
  }
  return out;
}

}  // namespace kwm
