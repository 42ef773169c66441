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

#include <kwm/exact_moments.hpp>
#include <kwm/kwise_sim.hpp>

#include <gtest/gtest.h>

#include <cmath>

using kwm::BigInt;
using kwm::Rational;

TEST(BuildFamily, Errors) {
  EXPECT_THROW(kwm::build_family(10, 1, 0.5, 11), std::invalid_argument);
  EXPECT_THROW(kwm::build_family(0, 4, 0.5, 11), std::invalid_argument);
  EXPECT_THROW(kwm::build_family(10, 4, 0.0, 11), std::invalid_argument);
  EXPECT_THROW(kwm::build_family(10, 4, 1.5, 11), std::invalid_argument);
  EXPECT_THROW(kwm::build_family(10, 4, 0.5, 12), std::invalid_argument);
  EXPECT_THROW(kwm::build_family(20, 4, 0.5, 11), std::invalid_argument);
}

TEST(BuildFamily, QuantizedVariance) {
  const auto f = kwm::build_family(100, 8, 0.5, 101);
  EXPECT_EQ(f.sigma2_hat(), Rational(BigInt(50), BigInt(101)));
  EXPECT_NEAR(f.quantization_error(), 0.5 - 50.0 / 101.0, 1e-15);
  EXPECT_EQ(f.marginal(), kwm::three_point(f.sigma2_hat()));
  EXPECT_EQ(f.bound_query().d, 8);
  EXPECT_EQ(kwm::build_family(7, 5, 0.6, 7).bound_query().d, 4);
  const auto full = kwm::build_family(5, 3, 1.0, 5);
  EXPECT_EQ(full.m_neg + full.m_pos, 4);  // at most p - 1 nonzero symbols
}

TEST(BuildFamily, SymbolMap) {
  const auto f = kwm::build_family(10, 2, 0.4, 11);
  ASSERT_EQ(f.m_neg, 2);
  EXPECT_EQ(f.symbol(0), -1);
  EXPECT_EQ(f.symbol(1), -1);
  EXPECT_EQ(f.symbol(2), 0);
  EXPECT_EQ(f.symbol(8), 0);
  EXPECT_EQ(f.symbol(9), 1);
  EXPECT_EQ(f.symbol(10), 1);
}

TEST(Primes, Small) {
  EXPECT_FALSE(kwm::is_prime(1));
  EXPECT_TRUE(kwm::is_prime(2));
  EXPECT_TRUE(kwm::is_prime(101));
  EXPECT_FALSE(kwm::is_prime(91));
  EXPECT_TRUE(kwm::is_prime(2147483647));
}

TEST(Uniformity, EveryKSubsetIsUniform) {
  const auto f = kwm::build_family(5, 3, 0.8, 5);
  const auto r = kwm::check_kwise_uniformity(f);
  EXPECT_TRUE(r.uniform);
  EXPECT_EQ(r.subsets_checked, 10);
  EXPECT_EQ(r.tuples, 125u);
  EXPECT_TRUE(kwm::check_kwise_uniformity(kwm::build_family(7, 4, 0.6, 7)).uniform);
  EXPECT_THROW(kwm::check_kwise_uniformity(kwm::build_family(3, 4, 0.6, 7)), std::invalid_argument);
}

TEST(Exhaustive, MomentsMatchIndependentSum) {
  const auto f = kwm::build_family(6, 4, 0.6, 7);
  const auto counts = kwm::exhaustive_histogram(f);
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  EXPECT_EQ(total, 2401u);
  for (long d : {2L, 4L}) {
    EXPECT_EQ(kwm::exhaustive_moment(f, d, counts), kwm::exact_moment_iid_threepoint({6, d, f.sigma2_hat()}));
  }
  EXPECT_EQ(kwm::exhaustive_moment(f, 3, counts), 0);
  EXPECT_EQ(kwm::seed_space_size(7, 4), std::optional<std::uint64_t>(2401));
  EXPECT_FALSE(kwm::seed_space_size(101, 3).has_value());
  EXPECT_THROW(kwm::exhaustive_histogram(kwm::build_family(100, 3, 0.5, 101)), std::invalid_argument);
}

TEST(Exhaustive, TailEstimateIsExact) {
  const auto f = kwm::build_family(5, 3, 0.8, 5);
  const auto counts = kwm::exhaustive_histogram(f);
  const auto e = kwm::exhaustive_tail_estimate(f, 0.0, counts);
  EXPECT_TRUE(e.exact);
  EXPECT_EQ(e.bound, 1.0);
  EXPECT_EQ(e.wilson_low, e.wilson_high);
  EXPECT_EQ(kwm::exhaustive_tail(f, 5.0, counts), 0);
  const auto j = kwm::to_json(e);
  EXPECT_TRUE(j.contains("exact_value"));
}

TEST(Sampling, DeterministicPerSeedAndTrial) {
  const auto f = kwm::build_family(100, 8, 0.5, 101);
  for (std::uint64_t t = 0; t < 50; ++t) EXPECT_EQ(kwm::sample_sum(f, 42, t), kwm::sample_sum(f, 42, t));
  EXPECT_EQ(kwm::simulate_histogram(f, 2000, 7), kwm::simulate_histogram(f, 2000, 7));
  EXPECT_NE(kwm::simulate_histogram(f, 2000, 7), kwm::simulate_histogram(f, 2000, 8));
}

TEST(Sampling, SingleSymbolChiSquare) {
  // n = 1: S is one symbol with law (m, p - 2m, m)/p.
  const auto f = kwm::build_family(1, 4, 0.5, 11);
  const std::uint64_t trials = 60000;
  const auto counts = kwm::simulate_histogram(f, trials, 123);
  const auto pmf = f.marginal();
  double chi2 = 0.0;
  for (int s = -1; s <= 1; ++s) {
    const double expected = pmf.prob_at(s).to_double() * static_cast<double>(trials);
    const double diff = static_cast<double>(counts[static_cast<std::size_t>(s + 1)]) - expected;
    chi2 += diff * diff / expected;
  }
  EXPECT_LT(chi2, 13.8);  // 2 degrees of freedom, p = 0.001
}

TEST(Tails, BeyondNIsZeroAndBoundIsClamped) {
  const auto f = kwm::build_family(20, 4, 0.5, 23);
  const auto e = kwm::empirical_tails(f, {0.0, 25.0}, 10000, 1);
  EXPECT_EQ(e[0].bound, 1.0);
  EXPECT_EQ(e[1].empirical, 0.0);
  EXPECT_LE(e[1].bound, 1.0);
  EXPECT_THROW(kwm::empirical_tail(f, 3.0, 9999, 1), std::invalid_argument);
  EXPECT_THROW(kwm::empirical_tail(f, -1.0, 10000, 1), std::invalid_argument);
}

TEST(Tails, WilsonInterval) {
  const auto w = kwm::wilson_interval(50, 100);
  EXPECT_NEAR(w.low, 0.4038, 1e-4);
  EXPECT_NEAR(w.high, 0.5962, 1e-4);
  const auto zero = kwm::wilson_interval(0, 1000);
  EXPECT_NEAR(zero.low, 0.0, 1e-15);
  EXPECT_NEAR(zero.high, 3.83e-3, 1e-5);
  EXPECT_THROW(kwm::wilson_interval(0, 0), std::invalid_argument);
}

TEST(Moments, EmpiricalVarianceWithinThreeStandardErrors) {
  const auto f = kwm::build_family(40, 4, 0.5, 41);
  const auto m = kwm::empirical_moment(f, 2, 20000, 5);
  const double exact = std::sqrt(kwm::exact_moment_iid_threepoint({40, 2, f.sigma2_hat()}).to_double());
  EXPECT_LE(std::fabs(m.norm - exact), 3.0 * m.standard_error + 1e-12);
  EXPECT_GT(m.standard_error, 0.0);
  EXPECT_THROW(kwm::empirical_moment(f, 6, 20000, 5), std::invalid_argument);
  EXPECT_THROW(kwm::empirical_moment(f, 3, 20000, 5), std::invalid_argument);
}
