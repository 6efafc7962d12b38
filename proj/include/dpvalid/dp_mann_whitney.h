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

#ifndef DPVALID_DP_MANN_WHITNEY_H_
#define DPVALID_DP_MANN_WHITNEY_H_

// Differentially private Mann-Whitney U test run directly on the sensitive
// data. The total size N is public. Part of the budget privatizes the smaller
// group size; the rest privatizes U with sensitivity derived from a
// high-probability lower bound on that size. The null distribution is
// simulated from the privatized size with the same noise.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dpvalid/dataset.h"
#include "dpvalid/random.h"
#include "dpvalid/stattests.h"
#include "dpvalid/synth.h"

namespace dpvalid {

struct DpMannWhitneyConfig {
  PrivacyBudget budget{1.0, 1e-6};
  // Share of epsilon spent on the group size.
  double size_fraction = 0.65;
  std::size_t null_samples = 10000;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct DpMannWhitneyResult {
  TestOutcome outcome;  // statistic = privatized U
  double true_u = 0.0;  // never released; kept for diagnostics
  double noisy_size = 0.0;
  std::int64_t size_estimate = 0;
  std::int64_t size_lower_bound = 0;
  double sensitivity = 0.0;
  std::vector<BudgetCharge> charges;
};

// `data` column "value" (or the first column) holds the values.
DpMannWhitneyResult dp_mann_whitney(const GroupedDataset& data,
                                    const DpMannWhitneyConfig& config,
                                    RandomSource& rng);

DpMannWhitneyResult dp_mann_whitney(std::span<const double> group0,
                                    std::span<const double> group1,
                                    const DpMannWhitneyConfig& config,
                                    RandomSource& rng);

enum class TieRule {
  // Permutations exactly as extreme as the observation count fully.
  kInclusive,
  // ...count half. This is the limit of the noisy test as epsilon grows,
  // since continuous noise breaks exact ties at random.
  kMidP,
};

// Non-private Monte Carlo permutation p-value for U with the same two-sided
// extremeness rule (distance from the null mean), (1 + extreme) / (K + 1).
double permutation_p_value(std::span<const double> x, std::span<const double> y,
                           std::size_t permutations, RandomSource& rng,
                           TieRule ties = TieRule::kInclusive);

}  // namespace dpvalid

#endif  // DPVALID_DP_MANN_WHITNEY_H_
