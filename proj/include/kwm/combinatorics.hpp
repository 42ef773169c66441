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

#include <kwm/rational.hpp>

#include <cmath>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kwm {

/// Ordered integer tuple; entries may be negative (they then zero the
/// multinomial coefficient).
using MultiIndex = std::vector<long>;

namespace detail {

/// Factorials 0!..cap! computed on demand. Entries are idempotent, so the
/// only shared state is the growing vector behind a mutex.
class FactorialTable {
 public:
  static constexpr std::size_t default_cap = 4096;

  static FactorialTable& instance() {
    static FactorialTable table;
    return table;
  }

  BigInt get(std::size_t m) {
    if (m > cap_) return compute(m);
    std::lock_guard<std::mutex> lock(mutex_);
    while (values_.size() <= m) {
      values_.push_back(values_.back() * static_cast<unsigned long>(values_.size()));
    }
    return values_[m];
  }

  void set_cap(std::size_t cap) {
    std::lock_guard<std::mutex> lock(mutex_);
    cap_ = cap;
  }

 private:
  FactorialTable() : values_{BigInt(1)} {}

  static BigInt compute(std::size_t m) {
    BigInt r;
    mpz_fac_ui(r.get_mpz_t(), m);
    return r;
  }

  std::mutex mutex_;
  std::vector<BigInt> values_;
  std::size_t cap_ = default_cap;
};

}  // namespace detail

/// m!. Values up to the memo cap (default 4096) are cached.
inline BigInt factorial(long m) {
  if (m < 0) throw std::domain_error("factorial of negative integer");
  return detail::FactorialTable::instance().get(static_cast<std::size_t>(m));
}

inline void set_factorial_memo_cap(std::size_t cap) { detail::FactorialTable::instance().set_cap(cap); }

/// d!/prod j_i!, extended by zero when an entry is negative or the entries do
/// not sum to d.
inline BigInt multinomial(long d, std::span<const long> j) {
  if (j.empty()) throw std::invalid_argument("multiindex must have at least one entry");
  long total = 0;
  for (long e : j) {
    if (e < 0) return BigInt(0);
    total += e;
  }
  if (d < 0 || total != d) return BigInt(0);
  BigInt denom = 1;
  for (long e : j) denom *= factorial(e);
  return BigInt(factorial(d) / denom);
}

inline BigInt multinomial(long d, const MultiIndex& j) { return multinomial(d, std::span<const long>(j)); }

/// C(n, l); zero outside 0 <= l <= n.
inline BigInt binomial(long n, long l) {
  if (n < 0) throw std::domain_error("binomial with negative n");
  if (l < 0 || l > n) return BigInt(0);
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(l));
  return r;
}

/// All elementary symmetric polynomials e_0..e_max_degree of u, by the
/// one-pass recurrence e_j <- e_j + u_i * e_{j-1}.
inline std::vector<Rational> elementary_symmetric_all(std::span<const Rational> u, std::size_t max_degree) {
  std::vector<Rational> e(max_degree + 1, Rational(0));
  e[0] = 1;
  std::size_t seen = 0;
  for (const Rational& x : u) {
    ++seen;
    const std::size_t top = seen < max_degree ? seen : max_degree;
    for (std::size_t j = top; j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e;
}

/// Pi_l(u): sum over l-subsets of the product of their entries.
inline Rational elementary_symmetric(long l, std::span<const Rational> u) {
  if (l < 1 || static_cast<std::size_t>(l) > u.size()) {
    throw std::invalid_argument("elementary_symmetric: degree " + std::to_string(l) + " outside [1, " +
                                std::to_string(u.size()) + "]");
  }
  return elementary_symmetric_all(u, static_cast<std::size_t>(l))[static_cast<std::size_t>(l)];
}

/// S_l(u) = Pi_l(u) / C(n, l).
inline Rational symmetric_mean(long l, std::span<const Rational> u) {
  const Rational pi = elementary_symmetric(l, u);
  return pi / Rational(binomial(static_cast<long>(u.size()), l));
}

/// sqrt(m) * (m/e)^m in floating point. Sanity checks only.
inline double stirling_estimate(long m) {
  if (m < 1) throw std::domain_error("stirling_estimate requires m >= 1");
  const double x = static_cast<double>(m);
  return std::exp(0.5 * std::log(x) + x * (std::log(x) - 1.0));
}

}  // namespace kwm
