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

// Property suites shared by `kwm verify`, the unit tests and the acceptance
// runner. Each returns a VerificationReport; zero failures means the suite
// holds.

#include <kwm/baselines.hpp>
#include <kwm/calibration.hpp>
#include <kwm/combinatorics.hpp>
#include <kwm/distributions.hpp>
#include <kwm/exact_moments.hpp>
#include <kwm/kwise_sim.hpp>
#include <kwm/oracle.hpp>
#include <kwm/sharp_bounds.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace kwm {

namespace detail {

struct RatioTracker {
  double min = INFINITY;
  double max = -INFINITY;
  void add(double r) {
    min = std::min(min, r);
    max = std::max(max, r);
  }
  nlohmann::json json() const {
    if (min > max) return nullptr;
    return {{"min", min}, {"max", max}};
  }
};

inline double ratio_of(const Rational& a, const Rational& b) {
  if (b.is_zero()) return a.is_zero() ? 1.0 : INFINITY;
  return (a / b).to_double();
}

}  // namespace detail

/// Random symmetric laws, n in [1,6], d in {2,4,6,8}. Every fifth case feeds
/// iid three-point laws, where equality must hold; d = 2 must always be equal.
inline VerificationReport verify_majorization(std::uint64_t seed, long cases = 500) {
  VerificationReport rep;
  rep.suite = "majorization";
  rep.seed = seed;
  detail::RatioTracker ratio;
  long tight = 0;
  for (long c = 0; c < cases; ++c) {
    CounterRng rng(seed, static_cast<std::uint64_t>(c));
    const long n = 1 + static_cast<long>(rng.uniform(6));
    const long d = 2 * (1 + static_cast<long>(rng.uniform(4)));
    const bool iid = c % 5 == 4;
    std::vector<DiscretePMF> comps;
    if (iid) {
      const Rational s2(BigInt(static_cast<long>(rng.uniform(16)) + 1), BigInt(16));
      comps.assign(static_cast<std::size_t>(n), three_point(s2));
      ++tight;
    } else {
      for (long i = 0; i < n; ++i) comps.push_back(random_symmetric_pmf(rng));
    }
    ++rep.cases;
    const MajorizationReport r = check_majorization(comps, d);
    if (!iid) ratio.add(detail::ratio_of(r.lhs, r.rhs));
    const bool must_equal = iid || d == 2;
    if (!r.holds || (must_equal && !r.equal)) {
      rep.fail({{"case", c}, {"n", n}, {"d", d}, {"iid", iid}, {"lhs", r.lhs.to_string()}, {"rhs", r.rhs.to_string()}});
    }
  }
  rep.extremal_ratios["lhs_over_rhs"] = ratio.json();
  rep.notes["tight_cases"] = tight;
  return rep;
}

/// Closed forms against the convolution oracle: the iid grid n <= 8, even
/// d <= 12, sigma2 in {1/8,1/4,1/2,3/4,1}, then `het_cases` seeded
/// heterogeneous cases with n <= 5, even d <= 10.
inline VerificationReport verify_formula(std::uint64_t seed, long het_cases = 200) {
  VerificationReport rep;
  rep.suite = "formula";
  rep.seed = seed;
  const std::array<Rational, 5> sigmas{Rational(1, 8), Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)};
  long iid_cases = 0;
  for (long n = 1; n <= 8; ++n) {
    for (long d = 2; d <= 12; d += 2) {
      for (const Rational& s2 : sigmas) {
        ++rep.cases;
        ++iid_cases;
        const Rational closed = exact_moment_iid_threepoint({n, d, s2});
        const std::vector<DiscretePMF> comps(static_cast<std::size_t>(n), three_point(s2));
        const Rational oracle = moment_of_sum(comps, d);
        if (closed != oracle) {
          rep.fail({{"kind", "iid"}, {"n", n}, {"d", d}, {"sigma2", s2.to_string()},
                    {"closed", closed.to_string()}, {"oracle", oracle.to_string()}});
        }
      }
    }
  }
  for (long c = 0; c < het_cases; ++c) {
    CounterRng rng(seed, static_cast<std::uint64_t>(c));
    const long n = 1 + static_cast<long>(rng.uniform(5));
    const long d = 2 * (1 + static_cast<long>(rng.uniform(5)));
    std::vector<Rational> s2s;
    std::vector<DiscretePMF> comps;
    for (long i = 0; i < n; ++i) {
      const long den = 1 + static_cast<long>(rng.uniform(12));
      const long num = static_cast<long>(rng.uniform(static_cast<std::uint64_t>(den + 1)));
      s2s.emplace_back(BigInt(num), BigInt(den));
      comps.push_back(three_point(s2s.back()));
    }
    ++rep.cases;
    const Rational closed = exact_moment_het_threepoint({d, s2s});
    const Rational oracle = moment_of_sum(comps, d);
    if (closed != oracle) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& s : s2s) list.push_back(s.to_string());
      rep.fail({{"kind", "het"}, {"case", c}, {"d", d}, {"sigma2s", list},
                {"closed", closed.to_string()}, {"oracle", oracle.to_string()}});
    }
  }
  rep.notes["iid_cases"] = iid_cases;
  rep.notes["het_cases"] = het_cases;
  return rep;
}

/// exact^{1/d}/M(unit) in [1/16, 16] and, per regime, exact^{1/d}/(c_r M)
/// in [1/2, 2]. By default the d > 2n corner is skipped; see in_corner().
inline VerificationReport verify_regimes(const CalibrationConstants& constants, bool include_corner = false,
                                         const BoundGrid& grid = acceptance_grid()) {
  VerificationReport rep;
  rep.suite = "regimes";
  std::array<detail::RatioTracker, 3> raw, calibrated;
  long skipped = 0;
  for (long n : grid.ns) {
    for (long d : grid.ds) {
      if (!include_corner && in_corner(n, d)) {
        skipped += static_cast<long>(grid.log2_sigma2.size());
        continue;
      }
      for (int e : grid.log2_sigma2) {
        ++rep.cases;
        const Rational s2 = dyadic(e);
        const Regime r = classify_regime(make_query(n, s2.to_double(), d));
        const double ratio = exact_to_bound_ratio(n, d, s2);
        const double cal = ratio / constants[r];
        raw[static_cast<std::size_t>(r)].add(ratio);
        calibrated[static_cast<std::size_t>(r)].add(cal);
        const bool sandwich = ratio >= 1.0 / 16.0 && ratio <= 16.0;
        const bool within2 = cal >= 0.5 && cal <= 2.0;
        if (!sandwich || !within2) {
          rep.fail({{"n", n}, {"d", d}, {"log2_sigma2", e}, {"regime", to_string(r)},
                    {"ratio", ratio}, {"calibrated_ratio", cal}, {"sandwich", sandwich}, {"within_factor_2", within2}});
        }
      }
    }
  }
  for (Regime r : all_regimes) {
    rep.extremal_ratios[std::string(to_string(r))] = {{"unit", raw[static_cast<std::size_t>(r)].json()},
                                                      {"calibrated", calibrated[static_cast<std::size_t>(r)].json()}};
  }
  rep.notes["corner_included"] = include_corner;
  rep.notes["corner_points_skipped"] = skipped;
  return rep;
}

/// Table ordering on d <= n, sigma2 <= mu <= 1:
/// M <= 2 max(sqrt(dn sigma2), d) <= 2 sqrt2 min(sqrt(dn), sqrt(dn mu + d^2)),
/// plus the proxy/M gap factors in the LogCorrected and SmallVariance regimes.
inline VerificationReport verify_dominance(const BoundGrid& grid = acceptance_grid()) {
  VerificationReport rep;
  rep.suite = "dominance";
  detail::RatioTracker lc_gap, sv_gap, first, second;
  for (long n : grid.ns) {
    for (long d : grid.ds) {
      if (d > n) continue;
      for (int e : grid.log2_sigma2) {
        const double s2 = std::ldexp(1.0, e);
        const BoundQuery bq = make_query(n, s2, d);
        const BoundResult m = sharp_bound_M(bq);
        const double proxy = schmidt_optimized({n, d, s2, std::nullopt}).proxy;
        for (double mu : {s2, 0.5 * (s2 + 1.0), 1.0}) {
          ++rep.cases;
          const double br = bellare_rompel({n, d, s2, mu});
          first.add(m.value / (2.0 * proxy));
          second.add(2.0 * proxy / (2.0 * std::numbers::sqrt2 * br));
          const double slack = 1.0 + 1e-12;
          if (!(m.value <= 2.0 * proxy * slack) || !(2.0 * proxy <= 2.0 * std::numbers::sqrt2 * br * slack)) {
            rep.fail({{"kind", "chain"}, {"n", n}, {"d", d}, {"log2_sigma2", e}, {"mu", mu},
                      {"M", m.value}, {"proxy", proxy}, {"bellare", br}});
          }
        }
        const double L = bq.log_ratio();
        const double gap = proxy / m.value;
        if (m.regime == Regime::LogCorrected) {
          lc_gap.add(gap / L);
          if (gap < L / 4.0 || gap > 4.0 * L) {
            rep.fail({{"kind", "log_corrected_gap"}, {"n", n}, {"d", d}, {"log2_sigma2", e}, {"gap", gap}, {"L", L}});
          }
        } else if (m.regime == Regime::SmallVariance) {
          sv_gap.add(gap / static_cast<double>(d));
          if (gap < static_cast<double>(d) / 4.0) {
            rep.fail({{"kind", "small_variance_gap"}, {"n", n}, {"d", d}, {"log2_sigma2", e}, {"gap", gap}});
          }
        }
      }
    }
  }
  rep.extremal_ratios["M_over_2proxy"] = first.json();
  rep.extremal_ratios["2proxy_over_2sqrt2_bellare"] = second.json();
  rep.extremal_ratios["log_corrected_gap_over_L"] = lc_gap.json();
  rep.extremal_ratios["small_variance_gap_over_d"] = sv_gap.json();
  return rep;
}

/// Both sides of ||X - EX||_d <= ||X - X'||_d <= 2||X - EX||_d on seeded
/// random laws over the quarter grid, d <= 10.
inline VerificationReport verify_symmetrization(std::uint64_t seed, long cases = 200) {
  VerificationReport rep;
  rep.suite = "symmetrization";
  rep.seed = seed;
  const auto grid = quarter_grid();
  detail::RatioTracker lower, upper;
  for (long c = 0; c < cases; ++c) {
    CounterRng rng(seed, static_cast<std::uint64_t>(c));
    const DiscretePMF pmf = random_pmf(rng, grid);
    const long d = 2 * (1 + static_cast<long>(rng.uniform(5)));
    ++rep.cases;
    const SymmetrizationReport r = check_symmetrization_props(pmf, d);
    if (!r.centered.is_zero()) {
      const double q = detail::ratio_of(r.symmetrized, r.centered);
      lower.add(q);
      upper.add(q / std::pow(2.0, static_cast<double>(d)));
    }
    if (!r.left_holds || !r.right_holds) {
      rep.fail({{"case", c}, {"d", d}, {"pmf", to_json(pmf)}, {"centered", r.centered.to_string()},
                {"symmetrized", r.symmetrized.to_string()}});
    }
  }
  rep.extremal_ratios["symmetrized_over_centered"] = lower.json();
  rep.extremal_ratios["symmetrized_over_2d_centered"] = upper.json();
  return rep;
}

struct KWiseConfig {
  long p;
  long k;
  long n;
  double sigma2;
  bool uniformity = true;  // C(n,k) p^k work; off for the large-n configs
};

/// Configurations with p^k <= 10^6 used by the exhaustive k-wise suite.
inline std::vector<KWiseConfig> kwise_exact_configs() {
  return {{5, 3, 5, 0.8}, {7, 4, 7, 0.6}, {7, 2, 6, 1.0}, {11, 5, 11, 0.5}, {11, 4, 6, 0.4}, {13, 4, 13, 0.3},
          {31, 4, 20, 0.2, false}, {97, 3, 97, 0.5, false}};
}

/// Exhaustive seed enumeration: every k-subset of positions is exactly
/// uniform, and for every even d <= k the seed-averaged E S^d equals the
/// independent-sum moment with the same marginals (oracle convolution and
/// closed form).
inline VerificationReport verify_kwise_exact(const std::vector<KWiseConfig>& configs = kwise_exact_configs()) {
  VerificationReport rep;
  rep.suite = "kwise-exact";
  nlohmann::json checked = nlohmann::json::array();
  for (const auto& cfg : configs) {
    const KWiseFamily f = build_family(cfg.n, cfg.k, cfg.sigma2, cfg.p);
    if (cfg.uniformity && cfg.k <= cfg.n) {
      ++rep.cases;
      const UniformityReport u = check_kwise_uniformity(f);
      if (!u.uniform) rep.fail({{"kind", "uniformity"}, {"p", cfg.p}, {"k", cfg.k}, {"n", cfg.n}, {"subset", u.first_bad_subset}});
    }
    const auto counts = exhaustive_histogram(f);
    const std::vector<DiscretePMF> comps(static_cast<std::size_t>(f.n), f.marginal());
    for (long d = 2; d <= f.k; d += 2) {
      ++rep.cases;
      const Rational seeded = exhaustive_moment(f, d, counts);
      const Rational oracle = moment_of_sum(comps, d);
      const Rational closed = exact_moment_iid_threepoint({f.n, d, f.sigma2_hat()});
      if (seeded != oracle || seeded != closed) {
        rep.fail({{"kind", "moment"}, {"p", cfg.p}, {"k", cfg.k}, {"n", cfg.n}, {"d", d},
                  {"seeded", seeded.to_string()}, {"oracle", oracle.to_string()}, {"closed", closed.to_string()}});
      }
    }
    checked.push_back({{"p", cfg.p}, {"k", cfg.k}, {"n", cfg.n}, {"sigma2_hat", f.sigma2_hat().to_string()}});
  }
  rep.notes["configs"] = checked;
  return rep;
}

/// Newton identities, Newton/Maclaurin inequalities (n <= 12, non-negative
/// rationals), multinomial zero-extension and the multinomial theorem, and
/// the symmetrization double inequality.
inline VerificationReport verify_preliminaries(std::uint64_t seed, long cases = 200) {
  VerificationReport rep;
  rep.suite = "preliminaries";
  rep.seed = seed;
  for (long c = 0; c < cases; ++c) {
    CounterRng rng(seed, static_cast<std::uint64_t>(c));
    const long n = 1 + static_cast<long>(rng.uniform(12));
    std::vector<Rational> u;
    for (long i = 0; i < n; ++i) {
      u.emplace_back(BigInt(static_cast<long>(rng.uniform(10))), BigInt(1 + static_cast<long>(rng.uniform(7))));
    }
    const auto e = elementary_symmetric_all(u, static_cast<std::size_t>(n));
    ++rep.cases;
    // Newton: l e_l = sum_{i=1}^{l} (-1)^{i-1} e_{l-i} p_i.
    for (long l = 1; l <= n; ++l) {
      Rational rhs = 0;
      for (long i = 1; i <= l; ++i) {
        Rational power_sum = 0;
        for (const auto& x : u) power_sum += x.pow(static_cast<unsigned>(i));
        const Rational term = e[static_cast<std::size_t>(l - i)] * power_sum;
        rhs += (i % 2 == 1) ? term : -term;
      }
      if (Rational(l) * e[static_cast<std::size_t>(l)] != rhs) {
        rep.fail({{"kind", "newton_identity"}, {"case", c}, {"l", l}});
      }
    }
    // S_l^2 >= S_{l-1} S_{l+1} and S_l^{l+1} >= S_{l+1}^l (Maclaurin, exact).
    std::vector<Rational> S(static_cast<std::size_t>(n + 1));
    S[0] = 1;
    for (long l = 1; l <= n; ++l) S[static_cast<std::size_t>(l)] = symmetric_mean(l, u);
    for (long l = 1; l < n; ++l) {
      const auto& a = S[static_cast<std::size_t>(l - 1)];
      const auto& b = S[static_cast<std::size_t>(l)];
      const auto& nx = S[static_cast<std::size_t>(l + 1)];
      if (b * b < a * nx) rep.fail({{"kind", "newton_inequality"}, {"case", c}, {"l", l}});
      if (b.pow(static_cast<unsigned>(l + 1)) < nx.pow(static_cast<unsigned>(l))) {
        rep.fail({{"kind", "maclaurin"}, {"case", c}, {"l", l}});
      }
    }
  }
  // Multinomial theorem: sum over j in N^m with |j| = d of multinomial = m^d,
  // and appending zeros leaves every coefficient unchanged.
  for (long m = 1; m <= 4; ++m) {
    for (long d = 0; d <= 8; ++d) {
      ++rep.cases;
      BigInt total = 0;
      MultiIndex j(static_cast<std::size_t>(m), 0);
      std::function<void(long, long)> rec = [&](long pos, long left) {
        if (pos == m - 1) {
          j[static_cast<std::size_t>(pos)] = left;
          const BigInt coef = multinomial(d, j);
          total += coef;
          MultiIndex padded = j;
          padded.push_back(0);
          if (multinomial(d, padded) != coef) rep.fail({{"kind", "zero_extension"}, {"m", m}, {"d", d}});
          return;
        }
        for (long v = 0; v <= left; ++v) {
          j[static_cast<std::size_t>(pos)] = v;
          rec(pos + 1, left - v);
        }
      };
      rec(0, d);
      BigInt expect;
      mpz_ui_pow_ui(expect.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(d));
      if (total != expect) rep.fail({{"kind", "multinomial_theorem"}, {"m", m}, {"d", d}});
    }
  }
  const VerificationReport sym = verify_symmetrization(seed ^ 0x5157ull, cases);
  rep.cases += sym.cases;
  for (const auto& f : sym.failures) rep.fail(f);
  rep.extremal_ratios = sym.extremal_ratios;
  return rep;
}

/// Exact central binomial moments (convolution of Bernoulli laws) against the
/// piecewise bound at sigma2 = p, within factor 16; symmetrized binomial
/// moments against the three-point formula at sigma2 = 2p(1-p), exactly.
inline VerificationReport verify_binomial(long max_n = 64, long max_d = 12) {
  VerificationReport rep;
  rep.suite = "binomial";
  detail::RatioTracker ratio;
  for (long inv = 2; inv <= 64; inv *= 2) {
    const Rational p(BigInt(1), BigInt(inv));
    const DiscretePMF bern = bernoulli_pmf(p);
    for (long n = 1; n <= max_n; ++n) {
      const std::vector<DiscretePMF> comps(static_cast<std::size_t>(n), bern);
      const DiscretePMF law = convolve_sum(comps).pmf;
      for (long d = 2; d <= max_d; d += 2) {
        ++rep.cases;
        const Rational exact = central_moment(law, static_cast<unsigned>(d));
        const double root = std::exp(exact.log() / static_cast<double>(d));
        const double r = root / sharp_bound_M(make_query(n, p.to_double(), d)).value;
        ratio.add(r);
        if (r < 1.0 / 16.0 || r > 16.0) {
          rep.fail({{"kind", "binomial_sandwich"}, {"n", n}, {"d", d}, {"p", p.to_string()}, {"ratio", r}});
        }
        if (n <= 16) {
          ++rep.cases;
          const Rational sym = exact_moment_symmetrized_binomial(n, p, d);
          const DiscretePMF pair = symmetrize(bern);
          const Rational oracle = moment_of_sum(std::vector<DiscretePMF>(static_cast<std::size_t>(n), pair), d);
          const Rational sigma2 = Rational(2) * p * (Rational(1) - p);
          if (sym != oracle || sym != exact_moment_iid_threepoint({n, d, sigma2})) {
            rep.fail({{"kind", "symmetrized_binomial"}, {"n", n}, {"d", d}, {"p", p.to_string()}});
          }
        }
      }
    }
  }
  rep.extremal_ratios["exact_root_over_M"] = ratio.json();
  return rep;
}

}  // namespace kwm
