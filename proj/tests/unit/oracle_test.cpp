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
#include <kwm/oracle.hpp>

#include <gtest/gtest.h>

using kwm::BigInt;
using kwm::DiscretePMF;
using kwm::Rational;

namespace {

Rational q(long a, long b) { return Rational(BigInt(a), BigInt(b)); }

const DiscretePMF kRademacher({{-1, q(1, 2)}, {1, q(1, 2)}});

}  // namespace

TEST(ConvolveSum, Examples) {
  const std::vector<DiscretePMF> zeros(4, DiscretePMF::point_mass(0));
  EXPECT_EQ(kwm::convolve_sum(zeros).pmf, DiscretePMF::point_mass(0));
  const std::vector<DiscretePMF> two(2, kRademacher);
  EXPECT_EQ(kwm::convolve_sum(two).pmf,
            DiscretePMF({{-2, q(1, 4)}, {0, q(1, 2)}, {2, q(1, 4)}}, kwm::Support::unbounded));
  const std::vector<DiscretePMF> three(3, kwm::three_point(q(1, 2)));
  const kwm::SumLaw law = kwm::convolve_sum(three);
  EXPECT_EQ(law.pmf.size(), 7u);
  EXPECT_EQ(kwm::central_moment(law.pmf, 4), 6);
  EXPECT_EQ(law.provenance.size(), 3u);
  EXPECT_THROW(kwm::convolve_sum({}), std::invalid_argument);
}

TEST(ConvolveSum, MixedDenominators) {
  const DiscretePMF a({{q(-1, 3), q(1, 2)}, {q(1, 3), q(1, 2)}});
  const DiscretePMF b({{q(-1, 2), q(1, 2)}, {q(1, 2), q(1, 2)}});
  const std::vector<DiscretePMF> v{a, b};
  EXPECT_EQ(kwm::convolve_sum(v).pmf,
            DiscretePMF({{q(-5, 6), q(1, 4)}, {q(-1, 6), q(1, 4)}, {q(1, 6), q(1, 4)}, {q(5, 6), q(1, 4)}},
                        kwm::Support::unbounded));
}

TEST(ConvolveSum, CommutativeAndAssociative) {
  kwm::CounterRng rng(11);
  const auto grid = kwm::quarter_grid();
  for (int t = 0; t < 30; ++t) {
    const DiscretePMF a = kwm::random_pmf(rng, grid), b = kwm::random_pmf(rng, grid), c = kwm::random_pmf(rng, grid);
    const std::vector<DiscretePMF> abc{a, b, c}, cab{c, a, b}, bca{b, c, a};
    const DiscretePMF ref = kwm::convolve_sum(abc).pmf;
    EXPECT_EQ(kwm::convolve_sum(cab).pmf, ref);
    EXPECT_EQ(kwm::convolve_sum(bca).pmf, ref);
    const std::vector<DiscretePMF> ab{a, b};
    const DiscretePMF ab_law = kwm::convolve_sum(ab).pmf;
    const std::vector<DiscretePMF> nested{ab_law, c};
    EXPECT_EQ(kwm::convolve_sum(nested).pmf, ref);
  }
}

TEST(ConvolveSum, CapNamesTheSize) {
  const std::vector<DiscretePMF> many(10, kwm::three_point(q(1, 2)));
  try {
    kwm::convolve_sum(many, 15);
    FAIL() << "expected ResourceError";
  } catch (const kwm::ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("exceeds cap 15"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(kwm::convolve_sum(many, 21));
}

TEST(MomentOfSum, Examples) {
  const std::vector<DiscretePMF> het{kwm::three_point(q(1, 2)), kwm::three_point(q(1, 3))};
  EXPECT_EQ(kwm::moment_of_sum(het, 4), q(11, 6));
  EXPECT_EQ(kwm::moment_of_sum(het, 4), kwm::exact_moment_het_threepoint({4, {q(1, 2), q(1, 3)}}));
  kwm::CounterRng rng(3);
  const auto grid = kwm::quarter_grid();
  for (int t = 0; t < 20; ++t) {
    std::vector<DiscretePMF> comps;
    Rational var = 0;
    for (int i = 0; i < 3; ++i) {
      comps.push_back(kwm::random_pmf(rng, grid));
      var += kwm::variance(comps.back());
    }
    EXPECT_EQ(kwm::moment_of_sum(comps, 2), var);
  }
  EXPECT_THROW(kwm::moment_of_sum(het, 3), std::invalid_argument);
}

TEST(MomentOfSum, SymmetricComponentsHaveNoOddMoments) {
  kwm::CounterRng rng(4);
  for (int t = 0; t < 20; ++t) {
    const std::vector<DiscretePMF> comps{kwm::random_symmetric_pmf(rng), kwm::random_symmetric_pmf(rng)};
    const DiscretePMF law = kwm::convolve_sum(comps).pmf;
    EXPECT_TRUE(law.is_symmetric());
    for (unsigned r = 1; r <= 7; r += 2) EXPECT_EQ(kwm::raw_moment(law, r), 0);
  }
}

TEST(Majorization, IidThreePointIsEquality) {
  const std::vector<DiscretePMF> comps(4, kwm::three_point(q(2, 5)));
  for (long d = 2; d <= 8; d += 2) {
    const auto r = kwm::check_majorization(comps, d);
    EXPECT_TRUE(r.equal);
    EXPECT_EQ(r.sigma2, q(2, 5));
  }
}

TEST(Majorization, InteriorMassIsStrictForDAtLeastFour) {
  const DiscretePMF half({{q(-1, 2), q(1, 2)}, {q(1, 2), q(1, 2)}});
  const std::vector<DiscretePMF> comps(3, half);
  const auto two = kwm::check_majorization(comps, 2);
  EXPECT_TRUE(two.equal);
  EXPECT_EQ(two.lhs, q(3, 4));
  for (long d = 4; d <= 8; d += 2) {
    const auto r = kwm::check_majorization(comps, d);
    EXPECT_EQ(r.sigma2, q(1, 4));
    EXPECT_TRUE(r.holds);
    EXPECT_FALSE(r.equal);
    EXPECT_LT(r.lhs, r.rhs);
  }
}

TEST(Majorization, RejectsBadComponents) {
  const std::vector<DiscretePMF> skew{kwm::bernoulli_pmf(q(1, 3))};
  EXPECT_THROW(kwm::check_majorization(skew, 4), std::invalid_argument);
  const std::vector<DiscretePMF> wide{DiscretePMF({{-2, q(1, 2)}, {2, q(1, 2)}}, kwm::Support::unbounded)};
  EXPECT_THROW(kwm::check_majorization(wide, 4), std::invalid_argument);
  EXPECT_THROW(kwm::check_majorization({}, 4), std::invalid_argument);
}

TEST(Symmetrization, Examples) {
  const auto point = kwm::check_symmetrization_props(DiscretePMF::point_mass(q(1, 3)), 4);
  EXPECT_EQ(point.centered, 0);
  EXPECT_EQ(point.symmetrized, 0);
  EXPECT_TRUE(point.left_holds && point.right_holds);

  const auto bern = kwm::check_symmetrization_props(kwm::bernoulli_pmf(q(1, 4)), 4);
  // Centered: (3/4)^4/4 + (1/4)^4 * 3/4 = 21/256. Symmetrized: 2 * 3/16 = 3/8.
  EXPECT_EQ(bern.centered, q(21, 256));
  EXPECT_EQ(bern.symmetrized, q(3, 8));
  EXPECT_LT(bern.centered, bern.symmetrized);
  EXPECT_LT(bern.symmetrized, Rational(16) * bern.centered);

  const DiscretePMF sym = kwm::three_point(q(1, 2));
  const auto s = kwm::check_symmetrization_props(sym, 6);
  EXPECT_GE(s.symmetrized, kwm::raw_moment(sym, 6));
}

TEST(RandomLaws, SeededAndValid) {
  kwm::CounterRng a(9), b(9);
  const auto grid = kwm::quarter_grid();
  EXPECT_EQ(grid.size(), 9u);
  for (int t = 0; t < 50; ++t) {
    const DiscretePMF x = kwm::random_symmetric_pmf(a);
    EXPECT_EQ(x, kwm::random_symmetric_pmf(b));
    EXPECT_TRUE(x.is_symmetric());
    EXPECT_TRUE(x.within_unit_interval());
  }
  kwm::CounterRng c(1);
  for (int t = 0; t < 50; ++t) {
    const auto parts = kwm::random_composition(c, 10, 4);
    ASSERT_EQ(parts.size(), 4u);
    long sum = 0;
    for (long v : parts) {
      EXPECT_GE(v, 0);
      sum += v;
    }
    EXPECT_EQ(sum, 10);
  }
}

TEST(Report, BoundedFailuresExactCount) {
  kwm::VerificationReport r;
  r.suite = "x";
  for (int i = 0; i < 70; ++i) r.fail({{"i", i}});
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.failure_count, 70);
  EXPECT_EQ(r.failures.size(), 50u);
  const auto j = kwm::to_json(r);
  EXPECT_EQ(j["failure_count"], 70);
  EXPECT_FALSE(j.contains("notes"));
}
