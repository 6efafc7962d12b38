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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpvalid/errors.h"

namespace dpvalid {

void DpMannWhitneyConfig::validate() const {
  if (!(budget.epsilon > 0) || !std::isfinite(budget.epsilon)) {
    throw ConfigError("epsilon", "must be positive and finite");
  }
  if (!(budget.delta > 0.0 && budget.delta < 1.0)) {
    throw ConfigError("delta", "must be in (0, 1) for the DP Mann-Whitney test");
  }
  if (!(size_fraction > 0.0 && size_fraction < 1.0)) {
    throw ConfigError("size_fraction", "must be in (0, 1)");
  }
  if (null_samples < 1000) {
    throw ConfigError("null_samples", "must be at least 1000");
  }
}

namespace {

// Sum of `k` distinct entries of `pool`, chosen uniformly. `pool` is left in
// a shuffled state, which is fine for repeated use.
double random_subset_sum(std::vector<double>& pool, std::size_t k,
                         RandomSource& rng) {
  const std::size_t n = pool.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
    sum += pool[i];
  }
  return sum;
}

// U of a random group of size `k` drawn from `ranks` (summing to `rank_total`).
double permuted_u(std::vector<double>& ranks, double rank_total, std::size_t k,
                  RandomSource& rng) {
  const std::size_t n = ranks.size();
  double rank_sum;
  if (k <= n - k) {
    rank_sum = random_subset_sum(ranks, k, rng);
  } else {
    rank_sum = rank_total - random_subset_sum(ranks, n - k, rng);
  }
  const double kk = static_cast<double>(k);
  return rank_sum - kk * (kk + 1.0) / 2.0;
}

}  // namespace

DpMannWhitneyResult dp_mann_whitney(std::span<const double> group0,
                                    std::span<const double> group1,
                                    const DpMannWhitneyConfig& config,
                                    RandomSource& rng) {
  config.validate();
  if (group0.empty() || group1.empty()) {
    throw ArgumentError("dp_mann_whitney: both groups must be non-empty");
  }
  const bool first_is_smaller = group0.size() <= group1.size();
  const auto smaller = first_is_smaller ? group0 : group1;
  const auto larger = first_is_smaller ? group1 : group0;
  const auto total = static_cast<std::int64_t>(group0.size() + group1.size());
  const double n_total = static_cast<double>(total);

  BudgetLedger ledger(config.budget);
  const double size_epsilon = config.size_fraction * config.budget.epsilon;
  const double u_epsilon = config.budget.epsilon - size_epsilon;

  DpMannWhitneyResult result;
  // Group-size count has sensitivity 1.
  result.noisy_size = static_cast<double>(smaller.size()) +
                      laplace_sample(1.0 / size_epsilon, rng);
  ledger.charge("laplace_group_size", size_epsilon, config.budget.delta);
  const std::int64_t half = total / 2;
  const double lower =
      std::floor(result.noisy_size -
                 std::log(1.0 / (2.0 * config.budget.delta)) / size_epsilon);
  result.size_lower_bound =
      static_cast<std::int64_t>(std::clamp(lower, -1e15, static_cast<double>(half)));
  result.size_estimate = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::llround(
          std::clamp(result.noisy_size, -1e15, 1e15))),
      1, std::max<std::int64_t>(half, 1));
  result.sensitivity =
      n_total - static_cast<double>(std::max<std::int64_t>(1, result.size_lower_bound));

  result.true_u = mann_whitney_u_statistic(smaller, larger);
  const double noise_scale = result.sensitivity / u_epsilon;
  const double noisy_u = result.true_u + laplace_sample(noise_scale, rng);
  ledger.charge("laplace_u_statistic", u_epsilon);
  ledger.require_exhausted();

  const auto k = static_cast<std::size_t>(result.size_estimate);
  const double m_hat = static_cast<double>(k);
  const double null_mean = m_hat * (n_total - m_hat) / 2.0;
  const double observed = std::fabs(noisy_u - null_mean);
  std::vector<double> ranks(static_cast<std::size_t>(total));
  std::iota(ranks.begin(), ranks.end(), 1.0);
  const double rank_total = n_total * (n_total + 1.0) / 2.0;
  std::size_t extreme = 0;
  for (std::size_t s = 0; s < config.null_samples; ++s) {
    const double u = permuted_u(ranks, rank_total, k, rng) +
                     laplace_sample(noise_scale, rng);
    if (std::fabs(u - null_mean) >= observed) ++extreme;
  }
  const double p = static_cast<double>(1 + extreme) /
                   static_cast<double>(config.null_samples + 1);
  result.outcome = TestOutcome{noisy_u, p, FailureReason::kNone};
  result.charges = ledger.charges();
  return result;
}

DpMannWhitneyResult dp_mann_whitney(const GroupedDataset& data,
                                    const DpMannWhitneyConfig& config,
                                    RandomSource& rng) {
  const auto& names = data.column_names();
  const std::size_t column =
      std::find(names.begin(), names.end(), "value") != names.end()
          ? data.column_index("value")
          : 0;
  const auto x = data.values_of(0, column);
  const auto y = data.values_of(1, column);
  return dp_mann_whitney(x, y, config, rng);
}

double permutation_p_value(std::span<const double> x, std::span<const double> y,
                           std::size_t permutations, RandomSource& rng,
                           TieRule ties) {
  if (x.empty() || y.empty() || permutations == 0) {
    throw ArgumentError("permutation_p_value: need two non-empty groups");
  }
  // Pooled midranks, so ties are handled as in the statistic itself.
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(pooled.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && pooled[order[j]] == pooled[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[k] = midrank;
    i = j;
  }
  const double n = static_cast<double>(pooled.size());
  const double nx = static_cast<double>(x.size());
  const double mean = nx * (n - nx) / 2.0;
  const double observed = std::fabs(mann_whitney_u_statistic(x, y) - mean);
  const double rank_total = n * (n + 1.0) / 2.0;
  double extreme = 0.0;
  for (std::size_t s = 0; s < permutations; ++s) {
    const double distance =
        std::fabs(permuted_u(ranks, rank_total, x.size(), rng) - mean);
    // U is a multiple of 0.5, so 1e-9 separates ties from strict excess.
    if (distance > observed + 1e-9) {
      extreme += 1.0;
    } else if (distance >= observed - 1e-9) {
      extreme += ties == TieRule::kMidP ? 0.5 : 1.0;
    }
  }
  return (1.0 + extreme) / static_cast<double>(permutations + 1);
}

}  // namespace dpvalid
