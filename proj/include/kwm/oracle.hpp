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

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kwm {

/// Thrown when an exact computation would exceed its configured size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact law of an independent sum, with the component laws it came from.
struct SumLaw {
  DiscretePMF pmf;
  std::vector<DiscretePMF> provenance;
};

inline constexpr std::size_t default_convolution_cap = 1'000'000;

/// Exact law of the sum of independent components.
///
/// All values are put on the integer grid value * L, L the lcm of every value
/// denominator, so each step is an index-shift convolution with rational
/// masses. Throws ResourceError when an intermediate grid exceeds `cap`.
inline SumLaw convolve_sum(std::span<const DiscretePMF> components, std::size_t cap = default_convolution_cap) {
  if (components.empty()) throw std::invalid_argument("convolve_sum needs at least one component");
  BigInt L = 1;
  for (const auto& c : components) {
    for (const Atom& a : c.atoms()) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), a.value.denominator().get_mpz_t());
  }
  auto to_grid = [&L](const Rational& v) {
    const Rational scaled = v * Rational(L);
    return BigInt(scaled.numerator());
  };

  BigInt offset = 0;  // grid index of acc[0]
  std::vector<Rational> acc{Rational(1)};
  for (const auto& c : components) {
    std::vector<std::pair<BigInt, const Rational*>> atoms;
    for (const Atom& a : c.atoms()) atoms.emplace_back(to_grid(a.value), &a.prob);
    const BigInt lo = atoms.front().first;
    const BigInt span_size = atoms.back().first - lo + 1;
    const BigInt new_size = BigInt(static_cast<unsigned long>(acc.size())) + span_size - 1;
    if (new_size > BigInt(static_cast<unsigned long>(cap))) {
      throw ResourceError("convolution grid of " + new_size.get_str() + " atoms exceeds cap " + std::to_string(cap));
    }
    std::vector<Rational> next(new_size.get_ui(), Rational(0));
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (acc[i].is_zero()) continue;
      for (const auto& [pos, prob] : atoms) {
        next[i + BigInt(pos - lo).get_ui()] += acc[i] * *prob;
      }
    }
    acc = std::move(next);
    offset += lo;
  }

  std::vector<Atom> out;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i].is_zero()) continue;
    out.push_back({Rational(BigInt(offset + static_cast<unsigned long>(i)), L), acc[i]});
  }
  return {DiscretePMF(std::move(out), Support::unbounded), std::vector<DiscretePMF>(components.begin(), components.end())};
}

/// E(S - ES)^d of the independent sum, exact.
inline Rational moment_of_sum(std::span<const DiscretePMF> components, long d,
                              std::size_t cap = default_convolution_cap) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("moment_of_sum needs even d >= 2");
  return central_moment(convolve_sum(components, cap).pmf, static_cast<unsigned>(d));
}

struct MajorizationReport {
  long n = 0;
  long d = 0;
  Rational sigma2;  // average variance
  Rational lhs;     // E(sum Z_i)^d
  Rational rhs;     // E(sum Z'_i)^d, Z'_i iid three_point(sigma2)
  bool holds = false;
  bool equal = false;
};

/// Compares the even moment of a sum of independent symmetric [-1,1] laws with
/// the sum of iid three-point laws of the same average variance. Both sides by
/// exact convolution.
inline MajorizationReport check_majorization(std::span<const DiscretePMF> components, long d) {
  if (components.empty()) throw std::invalid_argument("need at least one component");
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("d must be even");
  Rational total = 0;
  for (const auto& c : components) {
    if (c.support() != Support::unit_interval || !c.within_unit_interval()) {
      throw std::invalid_argument("majorization components must be supported in [-1,1]");
    }
    if (!c.is_symmetric()) throw std::invalid_argument("majorization components must be symmetric");
    total += variance(c);
  }
  MajorizationReport r;
  r.n = static_cast<long>(components.size());
  r.d = d;
  r.sigma2 = total / Rational(r.n);
  r.lhs = moment_of_sum(components, d);
  const std::vector<DiscretePMF> extreme(components.size(), three_point(r.sigma2));
  r.rhs = moment_of_sum(extreme, d);
  r.holds = r.lhs <= r.rhs;
  r.equal = r.lhs == r.rhs;
  return r;
}

struct SymmetrizationReport {
  Rational centered;     // E|X - EX|^d
  Rational symmetrized;  // E|X - X'|^d
  bool left_holds = false;   // centered <= symmetrized
  bool right_holds = false;  // symmetrized <= 2^d centered
};

/// ||X - EX||_d <= ||X - X'||_d <= 2 ||X - EX||_d, compared as d-th powers.
inline SymmetrizationReport check_symmetrization_props(const DiscretePMF& pmf, long d) {
  if (d < 2 || d % 2 != 0) throw std::invalid_argument("d must be even");
  SymmetrizationReport r;
  r.centered = central_abs_moment_even(pmf, static_cast<unsigned>(d));
  r.symmetrized = central_abs_moment_even(symmetrize(pmf), static_cast<unsigned>(d));
  r.left_holds = r.centered <= r.symmetrized;
  r.right_holds = r.symmetrized <= Rational(2).pow(static_cast<unsigned>(d)) * r.centered;
  return r;
}

// Seeded random laws -------------------------------------------------------

/// Uniformly random composition of `total` into `parts` non-negative integers
/// (stars and bars).
inline std::vector<long> random_composition(CounterRng& rng, long total, long parts) {
  std::vector<long> cuts;
  for (long i = 0; i < parts - 1; ++i) {
    cuts.push_back(static_cast<long>(rng.uniform(static_cast<std::uint64_t>(total + parts - 1))));
  }
  // Sample parts-1 distinct bar positions among total+parts-1 slots.
  std::vector<long> slots;
  {
    std::vector<char> used(static_cast<std::size_t>(total + parts - 1), 0);
    for (long i = 0; i < parts - 1; ++i) {
      long s = cuts[static_cast<std::size_t>(i)];
      while (used[static_cast<std::size_t>(s)]) s = (s + 1) % (total + parts - 1);
      used[static_cast<std::size_t>(s)] = 1;
      slots.push_back(s);
    }
  }
  std::sort(slots.begin(), slots.end());
  std::vector<long> out;
  long prev = -1;
  for (long s : slots) {
    out.push_back(s - prev - 1);
    prev = s;
  }
  out.push_back(total + parts - 1 - prev - 1);
  return out;
}

/// The grid {0, +-1/4, +-1/2, +-3/4, +-1}.
inline std::vector<Rational> quarter_grid() {
  std::vector<Rational> g;
  for (long i = -4; i <= 4; ++i) g.emplace_back(BigInt(i), BigInt(4));
  return g;
}

/// Random law on `grid` with masses from a random integer composition.
inline DiscretePMF random_pmf(CounterRng& rng, std::span<const Rational> grid, long granularity = 24) {
  const long total = 1 + static_cast<long>(rng.uniform(static_cast<std::uint64_t>(granularity)));
  const auto parts = random_composition(rng, total, static_cast<long>(grid.size()));
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < grid.size(); ++i) atoms.push_back({grid[i], Rational(BigInt(parts[i]), BigInt(total))});
  return DiscretePMF(std::move(atoms));
}

/// Random symmetric law on the quarter grid: a random law averaged with its
/// reflection.
inline DiscretePMF random_symmetric_pmf(CounterRng& rng) {
  const auto grid = quarter_grid();
  const DiscretePMF base = random_pmf(rng, grid);
  std::vector<Atom> atoms;
  for (const Atom& a : base.atoms()) {
    atoms.push_back({a.value, a.prob / Rational(2)});
    atoms.push_back({-a.value, a.prob / Rational(2)});
  }
  return DiscretePMF(std::move(atoms));
}

// Reports ------------------------------------------------------------------

/// {suite, seed, cases, failures: [...], extremal_ratios: {...}}.
struct VerificationReport {
  std::string suite;
  std::uint64_t seed = 0;
  long cases = 0;
  nlohmann::json failures = nlohmann::json::array();
  nlohmann::json extremal_ratios = nlohmann::json::object();
  nlohmann::json notes = nlohmann::json::object();

  bool passed() const { return failures.empty(); }

  void fail(nlohmann::json descriptor) {
    // Keep reports bounded; the count stays exact.
    ++failure_count;
    if (failures.size() < 50) failures.push_back(std::move(descriptor));
  }

  long failure_count = 0;
};

inline nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j{{"suite", r.suite},
                   {"seed", r.seed},
                   {"cases", r.cases},
                   {"failure_count", r.failure_count},
                   {"failures", r.failures},
                   {"extremal_ratios", r.extremal_ratios}};
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

}  // namespace kwm
