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

#ifndef DPVALID_STATTESTS_H_
#define DPVALID_STATTESTS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dpvalid {

// Why a test could not be run on a dataset. kNone iff the test was feasible.
enum class FailureReason {
  kNone,
  kSingleClass,
  kConstantValues,
  kLowExpectedFrequency,
  kDegenerateMedian,
};

inline constexpr FailureReason kAllFailureReasons[] = {
    FailureReason::kSingleClass, FailureReason::kConstantValues,
    FailureReason::kLowExpectedFrequency, FailureReason::kDegenerateMedian};

std::string_view to_string(FailureReason reason);
FailureReason parse_failure_reason(std::string_view text);

struct TestOutcome {
  double statistic = 0.0;
  std::optional<double> p_value;
  FailureReason failure = FailureReason::kNone;

  bool feasible() const { return failure == FailureReason::kNone; }
  bool rejects(double alpha) const {
    return feasible() && p_value.has_value() && *p_value < alpha;
  }

  static TestOutcome infeasible(FailureReason reason) {
    return TestOutcome{0.0, std::nullopt, reason};
  }
};

enum class TestKind { kMannWhitneyU, kTTest, kChiSquared, kMedian };

std::string_view to_string(TestKind kind);
TestKind parse_test_kind(std::string_view text);

// U of `x` with midranks for ties: U = R_x - n_x (n_x + 1) / 2.
double mann_whitney_u_statistic(std::span<const double> x,
                                std::span<const double> y);

// Two-sided Mann-Whitney U with tie-corrected normal approximation and
// continuity correction toward the mean. The statistic is U of `x`.
TestOutcome mann_whitney_u(std::span<const double> x,
                           std::span<const double> y);

// Pooled-variance Student t, df = n_x + n_y - 2.
TestOutcome t_test(std::span<const double> x, std::span<const double> y);

// Row-major contingency table of non-negative counts.
struct ContingencyTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> cells;

  std::int64_t at(std::size_t r, std::size_t c) const {
    return cells[r * cols + c];
  }
};

// Pearson statistic. With `yates` on a 2x2 table each |O - E| is reduced by
// min(0.5, |O - E|).
double pearson_statistic(const ContingencyTable& table, bool yates);

// Chi-squared test of independence. Infeasible when a row or column sum is
// zero (single-class) or any expected frequency is below 5.
TestOutcome chi_squared(const ContingencyTable& table, bool yates = true);

// Mood's median test: 2x2 table of counts above / at-or-below the pooled
// median per group, chi-squared with optional Yates correction.
TestOutcome median_test(std::span<const double> x, std::span<const double> y,
                        bool yates = true);

// Cross-tabulates group (rows) against category (columns). Categories with no
// observations are dropped. Returns nullopt when fewer than two categories
// remain.
std::optional<ContingencyTable> group_by_category(
    std::span<const std::size_t> x_categories,
    std::span<const std::size_t> y_categories, std::size_t category_count);

}  // namespace dpvalid

#endif  // DPVALID_STATTESTS_H_
