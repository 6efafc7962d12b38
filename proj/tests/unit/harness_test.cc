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

#include "dpvalid/harness.h"

#include <gtest/gtest.h>

#include <cmath>

#include "dpvalid/errors.h"

namespace dpvalid {
namespace {

ExperimentConfig gaussian_config(Method method, std::vector<double> epsilons,
                                 std::vector<std::size_t> sizes, std::size_t reps) {
  ExperimentConfig c;
  c.method = method;
  c.epsilons = std::move(epsilons);
  c.original_sizes = std::move(sizes);
  c.repetitions = reps;
  c.seed = 123;
  return c;
}

void expect_same(const ErrorRateReport& a, const ErrorRateReport& b) {
  EXPECT_EQ(a.method, b.method);
  EXPECT_EQ(a.epsilon, b.epsilon);
  EXPECT_EQ(a.n_original, b.n_original);
  EXPECT_EQ(a.n_synthetic, b.n_synthetic);
  EXPECT_EQ(a.feasible_count, b.feasible_count);
  EXPECT_EQ(a.rejections, b.rejections);
  EXPECT_EQ(a.error_rate, b.error_rate);
  EXPECT_EQ(a.failures, b.failures);
}

TEST(Aggregate, TypeOneArithmetic) {
  ExperimentConfig c = gaussian_config(Method::kNone, {0.0}, {10}, 10);
  c.min_feasible = 5;
  std::vector<RepetitionOutcome> outcomes(10);
  outcomes[3].rejected = outcomes[7].rejected = true;
  const auto r = aggregate(c, {Method::kNone, 0.0, 10, 10}, outcomes);
  EXPECT_EQ(r.error_kind, ErrorKind::kType1);
  EXPECT_DOUBLE_EQ(*r.error_rate, 0.2);
  EXPECT_FALSE(r.suppressed);
  EXPECT_FALSE(r.type1_context);
}

TEST(Aggregate, SuppressionAndFailurePartition) {
  ExperimentConfig c = gaussian_config(Method::kPerturbed, {1.0}, {10}, 100);
  std::vector<RepetitionOutcome> outcomes(100);
  for (std::size_t i = 0; i < 70; ++i) {
    outcomes[i].failure = i % 2 ? FailureReason::kSingleClass : FailureReason::kConstantValues;
  }
  outcomes[90].rejected = true;
  const auto r = aggregate(c, {Method::kPerturbed, 1.0, 10, 10}, outcomes);
  EXPECT_EQ(r.feasible_count, 30u);
  EXPECT_TRUE(r.suppressed);
  std::size_t failed = 0;
  for (const auto& [reason, count] : r.failures) failed += count;
  EXPECT_EQ(failed, 100u - r.feasible_count);
  EXPECT_EQ(r.failures.at(FailureReason::kSingleClass), 35u);
}

TEST(Aggregate, TypeTwoIsComplementAndFlagged) {
  ExperimentConfig c = gaussian_config(Method::kNone, {0.0}, {10}, 4);
  c.generator.mode = SimulationMode::kSignal;
  std::vector<RepetitionOutcome> outcomes(4);
  outcomes[0].rejected = outcomes[1].rejected = outcomes[2].rejected = true;
  const auto r = aggregate(c, {Method::kNone, 0.0, 10, 10}, outcomes);
  EXPECT_EQ(r.error_kind, ErrorKind::kType2);
  EXPECT_DOUBLE_EQ(*r.error_rate, 0.25);
  EXPECT_TRUE(r.type1_context);
}

TEST(Aggregate, NoFeasibleRepetitionLeavesRateEmpty) {
  ExperimentConfig c = gaussian_config(Method::kNone, {0.0}, {10}, 3);
  std::vector<RepetitionOutcome> outcomes(3);
  for (auto& o : outcomes) o.failure = FailureReason::kSingleClass;
  const auto r = aggregate(c, {Method::kNone, 0.0, 10, 10}, outcomes);
  EXPECT_FALSE(r.error_rate.has_value());
  EXPECT_TRUE(r.suppressed);
}

TEST(RunCell, BaselineIsCalibrated) {
  const auto c = gaussian_config(Method::kNone, {0.0}, {500}, 2000);
  const auto r = run_cell(c, expand_grid(c)[0]);
  EXPECT_EQ(r.feasible_count, 2000u);
  EXPECT_NEAR(*r.error_rate, 0.05, 0.015);
}

TEST(RunGrid, CartesianProduct) {
  const auto c = gaussian_config(Method::kPerturbed, {0.5, 5.0}, {50, 100}, 5);
  const auto reports = run_grid(c, 1);
  ASSERT_EQ(reports.size(), 4u);
  for (const auto& r : reports) {
    EXPECT_LE(r.rejections, r.feasible_count);
    EXPECT_LE(r.feasible_count, r.repetitions);
    EXPECT_EQ(r.n_synthetic, r.n_original);
  }
}

TEST(RunGrid, SmoothedSweepsSyntheticSizes) {
  auto c = gaussian_config(Method::kSmoothed, {1.0}, {20000}, 2);
  c.synthetic_sizes = {50, 100, 500, 1000};
  const auto reports = run_grid(c, 1);
  ASSERT_EQ(reports.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(reports[i].n_original, 20000u);
    EXPECT_EQ(reports[i].n_synthetic, c.synthetic_sizes[i]);
  }
}

TEST(RunGrid, ConflictingSizeSemanticsAreRejected) {
  auto c = gaussian_config(Method::kPerturbed, {1.0}, {100}, 2);
  c.synthetic_sizes = {50};
  EXPECT_THROW(c.validate(), ConfigError);
  auto s = gaussian_config(Method::kSmoothed, {1.0}, {100}, 2);
  try {
    s.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "synthetic_sizes");
  }
}

TEST(RunGrid, IndependentOfWorkerCount) {
  auto c = gaussian_config(Method::kMwem, {0.1, 10.0}, {50, 200}, 12);
  const auto one = run_grid(c, 1);
  const auto eight = run_grid(c, 8);
  ASSERT_EQ(one.size(), eight.size());
  for (std::size_t i = 0; i < one.size(); ++i) expect_same(one[i], eight[i]);
}

TEST(RunGrid, CellReproducibleInIsolation) {
  const auto c = gaussian_config(Method::kPerturbed, {0.1, 1.0, 10.0}, {50, 100}, 20);
  const auto reports = run_grid(c, 2);
  const auto cells = expand_grid(c);
  for (std::size_t i = 0; i < cells.size(); ++i) expect_same(run_cell(c, cells[i]), reports[i]);
  // Sub-grid: same cell, different grid composition.
  auto sub = c;
  sub.epsilons = {1.0};
  sub.original_sizes = {100};
  expect_same(run_grid(sub, 1)[0], run_cell(c, {Method::kPerturbed, 1.0, 100, 100}));
}

TEST(RunGrid, OriginalDataSharedAcrossEpsilons) {
  const auto c = gaussian_config(Method::kPerturbed, {0.1, 1.0}, {40}, 3);
  const auto a = original_data(c, 40, 2);
  const auto b = original_data(c, 40, 2);
  ASSERT_EQ(a.size(), 40u);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(a.column(0)[i], b.column(0)[i]);
  const auto other = original_data(c, 40, 3);
  EXPECT_NE(a.column(0)[0], other.column(0)[0]);
}

TEST(RunGrid, MultivariateSmallSampleFailuresArePartitioned) {
  const std::string path = std::string(DPVALID_SOURCE_DIR) + "/configs/prostate_copula.json";
  ExperimentConfig c;
  c.generator.kind = GeneratorSpec::Kind::kCopula;
  c.generator.copula = CopulaSpec::load(path);
  c.method = Method::kMarginalIpf;
  c.epsilons = {0.01};
  c.original_sizes = {50};
  c.repetitions = 40;
  c.variable = "pirads";
  c.test = TestKind::kChiSquared;
  c.seed = 5;
  const auto r = run_grid(c, 1)[0];
  std::size_t failed = 0;
  for (const auto& [reason, count] : r.failures) failed += count;
  EXPECT_EQ(failed, r.repetitions - r.feasible_count);
  EXPECT_EQ(r.suppressed, r.feasible_count < 50);
}

TEST(RunTest, ChiSquaredUsesConfiguredCategories) {
  ExperimentConfig c;
  c.test = TestKind::kChiSquared;
  c.test_binning = BinningSpec::parse("edges:48,50,52");
  GroupedDataset data;
  for (int i = 0; i < 40; ++i) data.add(i % 2, i % 4 < 2 ? 49.0 : 51.0);
  const auto r = run_test(c, data);
  ASSERT_TRUE(r.feasible());
  EXPECT_NEAR(*r.p_value, 1.0, 1e-12);
  GroupedDataset constant;
  for (int i = 0; i < 40; ++i) constant.add(i % 2, 49.0);
  EXPECT_EQ(run_test(c, constant).failure, FailureReason::kConstantValues);
  GroupedDataset one_group;
  one_group.add(0, 1.0);
  EXPECT_EQ(run_test(c, one_group).failure, FailureReason::kSingleClass);
}

TEST(Config, ParsesAndNamesBadFields) {
  const auto c = ExperimentConfig::from_json(R"({
    "generator": {"kind": "gaussian", "mode": "signal"},
    "synthesizer": "smoothed", "epsilons": [1, 10], "original_sizes": [20000],
    "synthetic_sizes": [100], "repetitions": 3, "test": "median", "seed": 9})");
  EXPECT_EQ(c.method, Method::kSmoothed);
  EXPECT_EQ(c.generator.mode, SimulationMode::kSignal);
  EXPECT_EQ(c.test, TestKind::kMedian);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.min_feasible, 50u);
  // The effective config parses back to the same thing.
  const auto again = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(again.to_json(), c.to_json());

  auto field_of = [](const char* text) {
    try {
      ExperimentConfig::from_json(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(field_of(R"({"epsilons": [1], "original_sizes": [10], "alpha": 2})"), "alpha");
  EXPECT_EQ(field_of(R"({"epsilons": [1], "original_sizes": [10], "repetitions": 0})"),
            "repetitions");
  EXPECT_EQ(field_of(R"({"epsilons": [], "original_sizes": [10], "synthesizer": "mwem"})"),
            "epsilons");
  EXPECT_EQ(field_of(R"({"epsilons": [1], "original_sizes": [11], "synthesizer": "mwem"})"),
            "original_sizes");
  EXPECT_EQ(field_of(R"({"epsilons": [1], "original_sizes": [10], "synthesizer": "dp-gan"})"),
            "synthesizer");
  EXPECT_EQ(field_of(R"({"epsilons": [1], "original_sizes": [10], "tset": "t"})"), "tset");
  EXPECT_EQ(field_of(R"({"epsilons": [1], "original_sizes": [10], "test": "mw_u",
                         "synthesizer": "dp_mw_baseline", "dp_mw": {"null_samples": 10}})"),
            "dp_mw.null_samples");
  EXPECT_EQ(field_of(R"({"epsilons": [1], "original_sizes": [10],
                         "generator": {"kind": "copula"}})"),
            "generator.spec");
}

TEST(Config, BaselineCollapsesEpsilonAxis) {
  const auto c = ExperimentConfig::from_json(
      R"({"synthesizer": "none", "epsilons": [1, 10], "original_sizes": [10, 20]})");
  EXPECT_EQ(expand_grid(c).size(), 2u);
}

}  // namespace
}  // namespace dpvalid
