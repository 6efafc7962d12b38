// Copyright 2026 The dpvalid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpvalid/dp_mann_whitney.h"

#include <gtest/gtest.h>

#include <cmath>

#include "dpvalid/errors.h"
#include "dpvalid/simgen.h"

namespace dpvalid {
namespace {

TEST(DpMannWhitney, ConfigValidation) {
  DpMannWhitneyConfig c;
  EXPECT_NO_THROW(c.validate());
  c.null_samples = 999;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.budget.delta = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.size_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(DpMannWhitney, EmptyGroupIsAnArgumentError) {
  const std::vector<double> x{1, 2}, empty;
  RandomSource rng(1);
  EXPECT_THROW(dp_mann_whitney(x, empty, {}, rng), ArgumentError);
}

TEST(DpMannWhitney, NoiselessLimitMatchesPermutationTest) {
  const std::vector<double> x{1, 2, 3}, y{4, 5, 6};
  DpMannWhitneyConfig c;
  c.budget = {1e6, 1e-6};
  RandomSource rng(2);
  const auto r = dp_mann_whitney(x, y, c, rng);
  EXPECT_EQ(r.true_u, 0.0);
  EXPECT_NEAR(r.outcome.statistic, 0.0, 0.01);
  // Noise breaks the tie between the observed U and the equally extreme
  // permutations at random, so the limit is the mid-p permutation p-value.
  RandomSource perm(3);
  const double reference = permutation_p_value(x, y, 10000, perm, TieRule::kMidP);
  EXPECT_NEAR(*r.outcome.p_value, reference, 0.03);
  // Exact: 2 of the 20 splits are as extreme; mid-p gives 1/20.
  EXPECT_NEAR(reference, 0.05, 0.01);
}

TEST(DpMannWhitney, BudgetSplitAndBounds) {
  RandomSource data(4);
  const auto d = gaussian_bivariate(200, SimulationMode::kNull, data);
  DpMannWhitneyConfig c;
  c.budget = {1.0, 1e-6};
  c.null_samples = 1000;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource rng(seed);
    const auto r = dp_mann_whitney(d, c, rng);
    ASSERT_EQ(r.charges.size(), 2u);
    EXPECT_DOUBLE_EQ(r.charges[0].epsilon + r.charges[1].epsilon, 1.0);
    EXPECT_NEAR(r.charges[0].epsilon, 0.65, 1e-15);
    EXPECT_EQ(r.charges[0].delta, 1e-6);
    EXPECT_EQ(r.charges[1].delta, 0.0);
    EXPECT_GE(r.size_estimate, 1);
    EXPECT_LE(r.size_estimate, 100);
    EXPECT_LE(r.size_lower_bound, 100);
    EXPECT_EQ(r.sensitivity, 200.0 - std::max<std::int64_t>(1, r.size_lower_bound));
    EXPECT_GT(*r.outcome.p_value, 0.0);
    EXPECT_LE(*r.outcome.p_value, 1.0);
  }
}

TEST(DpMannWhitney, PowerOnSignalData) {
  DpMannWhitneyConfig c;
  c.budget = {1.0, 1e-6};
  int misses = 0;
  const int reps = 200;
  for (int rep = 0; rep < reps; ++rep) {
    RandomSource rng(static_cast<std::uint64_t>(rep) + 1000);
    const auto d = gaussian_bivariate(1000, SimulationMode::kSignal, rng);
    misses += !dp_mann_whitney(d, c, rng).outcome.rejects(0.05);
  }
  EXPECT_LE(static_cast<double>(misses) / reps, 0.10);
}

TEST(PermutationPValue, TieRules) {
  const std::vector<double> x{1, 2, 3}, y{4, 5, 6};
  RandomSource a(5), b(5);
  const double inclusive = permutation_p_value(x, y, 20000, a, TieRule::kInclusive);
  const double mid = permutation_p_value(x, y, 20000, b, TieRule::kMidP);
  EXPECT_NEAR(inclusive, 0.1, 0.01);
  EXPECT_NEAR(mid, 0.05, 0.01);
}

}  // namespace
}  // namespace dpvalid
