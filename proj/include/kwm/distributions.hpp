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

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kwm {

struct Atom {
  Rational value;
  Rational prob;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Which support a PMF is allowed to have. Only `unit_interval` laws may
/// enter the majorization paths; `unbounded` is for binomial laws and sums.
enum class Support { unit_interval, unbounded };

/// Finite discrete law with exact rational atoms.
///
/// Construction canonicalizes: atoms are sorted by value, duplicate values are
/// merged and zero-probability atoms dropped. Probabilities must lie in [0,1]
/// and sum to exactly 1.
class DiscretePMF {
 public:
  explicit DiscretePMF(std::vector<Atom> atoms, Support support = Support::unit_interval) : support_(support) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    Rational total = 0;
    for (auto& a : atoms) {
      if (a.prob < Rational(0) || a.prob > Rational(1)) {
        throw std::invalid_argument("probability outside [0,1]: " + a.prob.to_string());
      }
      if (support == Support::unit_interval && (a.value < Rational(-1) || a.value > Rational(1))) {
        throw std::invalid_argument("atom outside [-1,1]: " + a.value.to_string());
      }
      total += a.prob;
      if (a.prob.is_zero()) continue;
      if (!atoms_.empty() && atoms_.back().value == a.value) {
        atoms_.back().prob += a.prob;
      } else {
        atoms_.push_back(std::move(a));
      }
    }
    if (total != Rational(1)) throw std::invalid_argument("probabilities sum to " + total.to_string() + ", not 1");
  }

  static DiscretePMF point_mass(const Rational& v, Support support = Support::unit_interval) {
    return DiscretePMF({{v, Rational(1)}}, support);
  }

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  Support support() const { return support_; }

  Rational prob_at(const Rational& v) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), v,
                               [](const Atom& a, const Rational& x) { return a.value < x; });
    return (it != atoms_.end() && it->value == v) ? it->prob : Rational(0);
  }

  bool is_symmetric() const {
    const std::size_t n = atoms_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Atom& lo = atoms_[i];
      const Atom& hi = atoms_[n - 1 - i];
      if (lo.value != -hi.value || lo.prob != hi.prob) return false;
    }
    return true;
  }

  bool within_unit_interval() const {
    return atoms_.empty() || (atoms_.front().value >= Rational(-1) && atoms_.back().value <= Rational(1));
  }

  /// Structural equality; the support flag is not part of the law.
  friend bool operator==(const DiscretePMF& a, const DiscretePMF& b) { return a.atoms_ == b.atoms_; }

 private:
  std::vector<Atom> atoms_;
  Support support_;
};

inline Rational raw_moment(const DiscretePMF& pmf, unsigned r) {
  Rational acc = 0;
  for (const Atom& a : pmf.atoms()) acc += a.prob * a.value.pow(r);
  return acc;
}

inline Rational mean(const DiscretePMF& pmf) { return raw_moment(pmf, 1); }

/// E(X - EX)^r for any r.
inline Rational central_moment(const DiscretePMF& pmf, unsigned r) {
  const Rational mu = mean(pmf);
  Rational acc = 0;
  for (const Atom& a : pmf.atoms()) acc += a.prob * (a.value - mu).pow(r);
  return acc;
}

inline Rational variance(const DiscretePMF& pmf) { return central_moment(pmf, 2); }

/// E|X - EX|^d for even d.
inline Rational central_abs_moment_even(const DiscretePMF& pmf, unsigned d) {
  if (d == 0 || d % 2 != 0) throw std::invalid_argument("central_abs_moment_even needs a positive even order");
  return central_moment(pmf, d);
}

/// The extreme law: -1 and +1 with probability sigma2/2 each, 0 otherwise.
inline DiscretePMF three_point(const Rational& sigma2) {
  if (sigma2 < Rational(0) || sigma2 > Rational(1)) {
    throw std::domain_error("three_point needs 0 <= sigma2 <= 1, got " + sigma2.to_string());
  }
  const Rational half = sigma2 / Rational(2);
  return DiscretePMF({{Rational(-1), half}, {Rational(0), Rational(1) - sigma2}, {Rational(1), half}});
}

inline DiscretePMF reflect(const DiscretePMF& pmf) {
  std::vector<Atom> atoms;
  atoms.reserve(pmf.size());
  for (const Atom& a : pmf.atoms()) atoms.push_back({-a.value, a.prob});
  return DiscretePMF(std::move(atoms), pmf.support());
}

/// Law of X - X' for independent copies. Support may reach [-2,2]; the result
/// is flagged unbounded when it leaves [-1,1].
inline DiscretePMF symmetrize(const DiscretePMF& pmf) {
  std::vector<Atom> atoms;
  atoms.reserve(pmf.size() * pmf.size());
  bool inside = true;
  for (const Atom& x : pmf.atoms()) {
    for (const Atom& y : pmf.atoms()) {
      Rational v = x.value - y.value;
      if (v > Rational(1) || v < Rational(-1)) inside = false;
      atoms.push_back({std::move(v), x.prob * y.prob});
    }
  }
  const Support support = (inside && pmf.support() == Support::unit_interval) ? Support::unit_interval
                                                                               : Support::unbounded;
  return DiscretePMF(std::move(atoms), support);
}

/// Values multiplied by `factor`; used to rescale symmetrized laws into [-1,1].
inline DiscretePMF scaled(const DiscretePMF& pmf, const Rational& factor, Support support) {
  std::vector<Atom> atoms;
  for (const Atom& a : pmf.atoms()) atoms.push_back({a.value * factor, a.prob});
  return DiscretePMF(std::move(atoms), support);
}

/// Bern(p) on {0, 1}.
inline DiscretePMF bernoulli_pmf(const Rational& p) {
  if (p < Rational(0) || p > Rational(1)) throw std::domain_error("bernoulli needs 0 <= p <= 1");
  return DiscretePMF({{Rational(0), Rational(1) - p}, {Rational(1), p}});
}

/// Binom(n, p) on {0..n}; flagged unbounded so majorization paths reject it.
inline DiscretePMF binomial_pmf(long n, const Rational& p) {
  if (n < 1) throw std::domain_error("binomial_pmf needs n >= 1");
  if (p < Rational(0) || p > Rational(1)) throw std::domain_error("binomial_pmf needs 0 <= p <= 1");
  std::vector<Atom> atoms;
  const Rational q = Rational(1) - p;
  for (long i = 0; i <= n; ++i) {
    atoms.push_back({Rational(i), Rational(binomial(n, i)) * p.pow(static_cast<unsigned>(i)) *
                                      q.pow(static_cast<unsigned>(n - i))});
  }
  return DiscretePMF(std::move(atoms), Support::unbounded);
}

/// p <= 1/2 with 2p(1-p) = sigma2, i.e. p = (1 - sqrt(1 - 2 sigma2)) / 2.
///
/// Evaluated as sigma2 / (1 + sqrt(1 - 2 sigma2)) to avoid cancellation for
/// small sigma2.
inline double bernoulli_p_from_sigma2(const Rational& sigma2) {
  if (sigma2 < Rational(0)) throw std::domain_error("sigma2 must be non-negative");
  if (sigma2 > Rational(1, 2)) {
    throw std::domain_error("no symmetrized Bernoulli has variance " + sigma2.to_string() + " > 1/2");
  }
  const double s = sigma2.to_double();
  return s / (1.0 + std::sqrt(1.0 - 2.0 * s));
}

/// Exact check that a rational p realizes sigma2 = 2p(1-p) with p <= 1/2.
inline bool verify_bernoulli_p(const Rational& p, const Rational& sigma2) {
  if (p < Rational(0) || p > Rational(1, 2)) return false;
  return Rational(2) * p * (Rational(1) - p) == sigma2;
}

// JSON: [{"value": "num/den", "prob": "num/den"}, ...]

inline nlohmann::json to_json(const DiscretePMF& pmf) {
  auto arr = nlohmann::json::array();
  for (const Atom& a : pmf.atoms()) arr.push_back({{"value", a.value.to_string()}, {"prob", a.prob.to_string()}});
  return arr;
}

inline DiscretePMF pmf_from_json(const nlohmann::json& j, Support support = Support::unit_interval) {
  if (!j.is_array()) throw std::invalid_argument("PMF JSON must be an array");
  std::vector<Atom> atoms;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("value") || !item.contains("prob") || !item["value"].is_string() ||
        !item["prob"].is_string()) {
      throw std::invalid_argument("PMF atom must be {\"value\": \"num/den\", \"prob\": \"num/den\"}");
    }
    atoms.push_back({Rational::parse(item["value"].get<std::string>()),
                     Rational::parse(item["prob"].get<std::string>())});
  }
  return DiscretePMF(std::move(atoms), support);
}

}  // namespace kwm
