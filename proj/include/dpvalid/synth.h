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

#ifndef DPVALID_SYNTH_H_
#define DPVALID_SYNTH_H_

// Differentially private synthetic data generators over grouped histograms
// and discrete marginals. Every generator is a pure function of its inputs
// and the RandomSource state, and records its privacy spend in a ledger that
// must sum to the requested epsilon.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpvalid/dataset.h"
#include "dpvalid/joint.h"
#include "dpvalid/random.h"

namespace dpvalid {

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;

  // Throws ArgumentError unless epsilon > 0 and 0 <= delta < 1.
  void validate() const;
  // validate() plus delta == 0.
  void validate_pure() const;
};

struct BudgetCharge {
  std::string mechanism;
  double epsilon = 0.0;
  double delta = 0.0;
};

// Append-only record of the privacy spent by one invocation.
class BudgetLedger {
 public:
  explicit BudgetLedger(PrivacyBudget budget) : budget_(budget) {}

  void charge(std::string mechanism, double epsilon, double delta = 0.0);
  double spent_epsilon() const;
  double spent_delta() const;
  // Throws std::logic_error unless the spend matches the budget to 1e-12
  // relative error.
  void require_exhausted() const;

  const std::vector<BudgetCharge>& charges() const { return charges_; }

 private:
  PrivacyBudget budget_;
  std::vector<BudgetCharge> charges_;
};

enum class Synthesizer { kPerturbed, kSmoothed, kMwem, kMarginalIpf };

std::string_view to_string(Synthesizer method);
// Accepts "perturbed", "smoothed", "mwem", "marginal_ipf" (and "ipf").
Synthesizer parse_synthesizer(std::string_view text);

struct Provenance {
  std::string method;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t original_n = 0;
  std::size_t synthetic_n = 0;
  std::vector<BudgetCharge> charges;
};

struct SyntheticDataset {
  GroupedDataset data;
  Provenance provenance;
};

// ---------------------------------------------------------------------------
// Perturbed histogram.

struct PerturbedOptions {
  // Rescale the clamped noisy counts to sum to the original size (largest
  // remainder rounding) instead of emitting them as-is.
  bool normalize_to_original = false;
};

// Discrete-Laplace(2/epsilon) noise on every group x bin cell, negatives set
// to zero.
std::vector<std::int64_t> perturbed_counts(const GroupedHistogram& hist,
                                           const PrivacyBudget& budget,
                                           RandomSource& rng,
                                           const PerturbedOptions& options = {});

SyntheticDataset perturbed_histogram(const GroupedHistogram& hist,
                                     const PrivacyBudget& budget,
                                     RandomSource& rng,
                                     const PerturbedOptions& options = {});

// ---------------------------------------------------------------------------
// Smoothed histogram.

// p_i = (c_i + a) / sum_j (c_j + a) with a = 2m/epsilon.
std::vector<double> smoothed_probabilities(std::span<const std::int64_t> counts,
                                           std::size_t m, double epsilon);

// Exponential-mechanism form: score s_i = a ln(c_i + a), weight
// exp(epsilon s_i / (2m)), normalized. Algebraically equal to the above.
std::vector<double> smoothed_probabilities_exponential(
    std::span<const std::int64_t> counts, std::size_t m, double epsilon);

// Draws exactly m records i.i.d. from smoothed_probabilities over all
// group x bin cells.
SyntheticDataset smoothed_histogram(const GroupedHistogram& hist,
                                    const PrivacyBudget& budget, std::size_t m,
                                    RandomSource& rng);

// ---------------------------------------------------------------------------
// MWEM.

struct MwemOptions {
  std::size_t iterations = 10;
  // Multiplicative-weights passes over all measurements after each new
  // measurement.
  std::size_t update_passes = 100;
  // Query workload: every cell of each listed marginal is one counting query.
  // Empty means the full joint (one query per cell).
  std::vector<Marginal> workload;
};

struct MwemFit {
  std::vector<double> distribution;
  // Distribution after each iteration (for diagnostics and tests).
  std::vector<std::vector<double>> history;
  // Selected (marginal index, marginal cell) per iteration.
  std::vector<std::pair<std::size_t, std::size_t>> selected;
  std::vector<double> measurements;
  // Number of times the private counts were consulted.
  std::size_t private_reads = 0;
  std::vector<BudgetCharge> charges;
};

// Fits the MWEM distribution to `counts` over `domain`. `counts` is only read
// through the exponential-mechanism scores and the Laplace measurements.
MwemFit mwem_fit(std::span<const double> counts, const JointDomain& domain,
                 const PrivacyBudget& budget, RandomSource& rng,
                 const MwemOptions& options = {});

SyntheticDataset mwem(const GroupedHistogram& hist, const PrivacyBudget& budget,
                      RandomSource& rng, const MwemOptions& options = {});

// Multivariate MWEM: default workload is all one- and two-way marginals.
SyntheticDataset mwem(const GroupedDataset& data, const DiscreteSchema& schema,
                      const PrivacyBudget& budget, RandomSource& rng,
                      MwemOptions options = {});

// ---------------------------------------------------------------------------
// Noisy marginals + iterative proportional fitting.

struct IpfOptions {
  std::size_t max_sweeps = 500;
  double tolerance = 1e-8;
  // Also stop once a full sweep changes no joint cell by more than this
  // (inconsistent noisy marginals settle into a fixed cycle).
  double stagnation = 1e-13;
};

struct IpfFit {
  std::vector<double> joint;
  std::size_t sweeps = 0;
  double max_marginal_error = 0.0;
  bool converged = false;
};

// Fits a joint distribution whose marginals match the probability `targets`,
// starting from uniform.
IpfFit fit_ipf(const JointDomain& domain, std::span<const Marginal> marginals,
               std::span<const std::vector<double>> targets,
               const IpfOptions& options = {});

struct MarginalIpfResult {
  SyntheticDataset synthetic;
  IpfFit fit;
};

// Laplace(2k/epsilon) noise on every cell of each of the k marginals, clamp,
// renormalize, fit by IPF, then sample original_n records.
MarginalIpfResult marginal_ipf(const GroupedDataset& data,
                               const DiscreteSchema& schema,
                               const PrivacyBudget& budget,
                               std::span<const Marginal> marginals,
                               RandomSource& rng, const IpfOptions& options = {});

}  // namespace dpvalid

#endif  // DPVALID_SYNTH_H_
