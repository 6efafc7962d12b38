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

#include "dpvalid/stattests.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dpvalid/errors.h"
#include "dpvalid/special_functions.h"

namespace dpvalid {

std::string_view to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::kNone:
      return "none";
    case FailureReason::kSingleClass:
      return "single-class";
    case FailureReason::kConstantValues:
      return "constant-values";
    case FailureReason::kLowExpectedFrequency:
      return "low-expected-frequency";
    case FailureReason::kDegenerateMedian:
      return "degenerate-median";
  }
  return "unknown";
}

FailureReason parse_failure_reason(std::string_view text) {
  for (auto r : {FailureReason::kNone, FailureReason::kSingleClass,
                 FailureReason::kConstantValues,
                 FailureReason::kLowExpectedFrequency,
                 FailureReason::kDegenerateMedian}) {
    if (to_string(r) == text) return r;
  }
  throw ArgumentError("unknown failure reason '" + std::string(text) + "'");
}

std::string_view to_string(TestKind kind) {
  switch (kind) {
    case TestKind::kMannWhitneyU:
      return "mw_u";
    case TestKind::kTTest:
      return "t";
    case TestKind::kChiSquared:
      return "chi2";
    case TestKind::kMedian:
      return "median";
  }
  return "unknown";
}

TestKind parse_test_kind(std::string_view text) {
  for (auto k : {TestKind::kMannWhitneyU, TestKind::kTTest,
                 TestKind::kChiSquared, TestKind::kMedian}) {
    if (to_string(k) == text) return k;
  }
  throw ArgumentError("unknown test '" + std::string(text) +
                      "' (expected mw_u, t, chi2 or median)");
}

namespace {

struct RankSummary {
  double rank_sum_x = 0.0;
  // Sum over tie groups of t^3 - t.
  double tie_term = 0.0;
};

RankSummary rank_pooled(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size() + y.size();
  std::vector<std::pair<double, bool>> pooled;
  pooled.reserve(n);
  for (double v : x) pooled.emplace_back(v, true);
  for (double v : y) pooled.emplace_back(v, false);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  RankSummary out;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    // Ranks i+1..j share the midrank.
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    std::size_t in_x = 0;
    for (std::size_t k = i; k < j; ++k) in_x += pooled[k].second ? 1 : 0;
    out.rank_sum_x += midrank * static_cast<double>(in_x);
    const double t = static_cast<double>(j - i);
    out.tie_term += t * t * t - t;
    i = j;
  }
  return out;
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sum_sq_dev(std::span<const double> v, double m) {
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

}  // namespace

double mann_whitney_u_statistic(std::span<const double> x,
                                std::span<const double> y) {
  const auto ranks = rank_pooled(x, y);
  const double nx = static_cast<double>(x.size());
  return ranks.rank_sum_x - nx * (nx + 1.0) / 2.0;
}

TestOutcome mann_whitney_u(std::span<const double> x,
                           std::span<const double> y) {
  if (x.empty() || y.empty()) {
    return TestOutcome::infeasible(FailureReason::kSingleClass);
  }
  const auto ranks = rank_pooled(x, y);
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  const double n = n1 + n2;
  const double u = ranks.rank_sum_x - n1 * (n1 + 1.0) / 2.0;
  const double mu = n1 * n2 / 2.0;
  const double variance =
      n1 * n2 / 12.0 * ((n + 1.0) - ranks.tie_term / (n * (n - 1.0)));
  if (!(variance > 0.0)) {
    return TestOutcome::infeasible(FailureReason::kConstantValues);
  }
  const double z = (std::fabs(u - mu) - 0.5) / std::sqrt(variance);
  const double p = std::min(1.0, 2.0 * normal_sf(z));
  return TestOutcome{u, p, FailureReason::kNone};
}

TestOutcome t_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) {
    return TestOutcome::infeasible(FailureReason::kSingleClass);
  }
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  const double m1 = mean(x);
  const double m2 = mean(y);
  const double df = n1 + n2 - 2.0;
  const double pooled = (sum_sq_dev(x, m1) + sum_sq_dev(y, m2)) / df;
  if (!(pooled > 0.0)) {
    return TestOutcome::infeasible(FailureReason::kConstantValues);
  }
  const double t = (m1 - m2) / std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
  return TestOutcome{t, student_t_two_sided(t, df), FailureReason::kNone};
}

double pearson_statistic(const ContingencyTable& table, bool yates) {
  if (table.rows == 0 || table.cols == 0 ||
      table.cells.size() != table.rows * table.cols) {
    throw ArgumentError("contingency table: shape does not match cells");
  }
  std::vector<double> row_sums(table.rows, 0.0);
  std::vector<double> col_sums(table.cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < table.rows; ++r) {
    for (std::size_t c = 0; c < table.cols; ++c) {
      const auto v = table.at(r, c);
      if (v < 0) throw ArgumentError("contingency table: negative count");
      row_sums[r] += static_cast<double>(v);
      col_sums[c] += static_cast<double>(v);
      total += static_cast<double>(v);
    }
  }
  const bool correct = yates && table.rows == 2 && table.cols == 2;
  double statistic = 0.0;
  for (std::size_t r = 0; r < table.rows; ++r) {
    for (std::size_t c = 0; c < table.cols; ++c) {
      const double expected = row_sums[r] * col_sums[c] / total;
      if (expected <= 0.0) continue;
      double diff = std::fabs(static_cast<double>(table.at(r, c)) - expected);
      if (correct) diff -= std::min(0.5, diff);
      statistic += diff * diff / expected;
    }
  }
  return statistic;
}

TestOutcome chi_squared(const ContingencyTable& table, bool yates) {
  if (table.rows < 2 || table.cols < 2 ||
      table.cells.size() != table.rows * table.cols) {
    throw ArgumentError("chi_squared: need at least a 2x2 table");
  }
  std::vector<double> row_sums(table.rows, 0.0);
  std::vector<double> col_sums(table.cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < table.rows; ++r) {
    for (std::size_t c = 0; c < table.cols; ++c) {
      const auto v = table.at(r, c);
      if (v < 0) throw ArgumentError("chi_squared: negative count");
      row_sums[r] += static_cast<double>(v);
      col_sums[c] += static_cast<double>(v);
      total += static_cast<double>(v);
    }
  }
  for (double s : row_sums) {
    if (s <= 0.0) return TestOutcome::infeasible(FailureReason::kSingleClass);
  }
  for (double s : col_sums) {
    if (s <= 0.0) return TestOutcome::infeasible(FailureReason::kSingleClass);
  }
  const double statistic = pearson_statistic(table, yates);
  for (double rs : row_sums) {
    for (double cs : col_sums) {
      if (rs * cs / total < 5.0) {
        TestOutcome out = TestOutcome::infeasible(FailureReason::kLowExpectedFrequency);
        out.statistic = statistic;
        return out;
      }
    }
  }
  const double df =
      static_cast<double>((table.rows - 1) * (table.cols - 1));
  return TestOutcome{statistic, chi_squared_sf(statistic, df),
                     FailureReason::kNone};
}

TestOutcome median_test(std::span<const double> x, std::span<const double> y,
                        bool yates) {
  if (x.empty() || y.empty()) {
    return TestOutcome::infeasible(FailureReason::kSingleClass);
  }
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::size_t n = pooled.size();
  std::sort(pooled.begin(), pooled.end());
  const double median = (n % 2 == 1)
                            ? pooled[n / 2]
                            : 0.5 * (pooled[n / 2 - 1] + pooled[n / 2]);
  auto above = [median](std::span<const double> v) {
    return static_cast<std::int64_t>(
        std::count_if(v.begin(), v.end(), [median](double a) { return a > median; }));
  };
  const std::int64_t ax = above(x);
  const std::int64_t ay = above(y);
  ContingencyTable table{2, 2,
                         {ax, ay, static_cast<std::int64_t>(x.size()) - ax,
                          static_cast<std::int64_t>(y.size()) - ay}};
  if (ax + ay == 0 || ax + ay == static_cast<std::int64_t>(n)) {
    return TestOutcome::infeasible(FailureReason::kDegenerateMedian);
  }
  const double statistic = pearson_statistic(table, yates);
  return TestOutcome{statistic, chi_squared_sf(statistic, 1.0),
                     FailureReason::kNone};
}

std::optional<ContingencyTable> group_by_category(
    std::span<const std::size_t> x_categories,
    std::span<const std::size_t> y_categories, std::size_t category_count) {
  std::vector<std::int64_t> wide(2 * category_count, 0);
  for (auto c : x_categories) {
    if (c >= category_count) throw ArgumentError("group_by_category: category out of range");
    ++wide[c];
  }
  for (auto c : y_categories) {
    if (c >= category_count) throw ArgumentError("group_by_category: category out of range");
    ++wide[category_count + c];
  }
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < category_count; ++c) {
    if (wide[c] + wide[category_count + c] > 0) kept.push_back(c);
  }
  if (kept.size() < 2) return std::nullopt;
  ContingencyTable table{2, kept.size(), std::vector<std::int64_t>(2 * kept.size())};
  for (std::size_t k = 0; k < kept.size(); ++k) {
    table.cells[k] = wide[kept[k]];
    table.cells[kept.size() + k] = wide[category_count + kept[k]];
  }
  return table;
}

}  // namespace dpvalid
