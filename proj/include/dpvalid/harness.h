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

#ifndef DPVALID_HARNESS_H_
#define DPVALID_HARNESS_H_

// Repetition engine for Type I / Type II error rates of two-sample tests on
// DP-synthetic data.
//
// Every repetition draws from two child streams of the master seed: one keyed
// by (original size, repetition) for the original data, so all methods and
// epsilons at a given size see the same original datasets, and one keyed by
// (cell, repetition) for the mechanism and test. Results therefore do not
// depend on grid composition, execution order or worker count.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpvalid/dataset.h"
#include "dpvalid/simgen.h"
#include "dpvalid/stattests.h"
#include "dpvalid/synth.h"

namespace dpvalid {

enum class Method {
  kNone,  // test the original data directly
  kPerturbed,
  kSmoothed,
  kMwem,
  kMarginalIpf,
  kDpMannWhitney,
};

std::string_view to_string(Method method);
// Accepts none, perturbed, smoothed, mwem, marginal_ipf, dp_mw_baseline.
Method parse_method(std::string_view text);

struct GeneratorSpec {
  enum class Kind { kGaussian, kCopula, kCsv };

  Kind kind = Kind::kGaussian;
  SimulationMode mode = SimulationMode::kNull;
  std::string copula_path;
  std::optional<CopulaSpec> copula;
  std::string csv_path;
  std::string csv_format = "grouped";  // or "cardio"
  // Loaded CSV records; subsampled without replacement per repetition.
  std::optional<GroupedDataset> csv_data;
  // For CSV sources: whether the groups are known to share a distribution.
  bool csv_null_truth = false;

  bool null_truth() const {
    return kind == Kind::kCsv ? csv_null_truth : mode == SimulationMode::kNull;
  }
};

struct ExperimentConfig {
  std::string name = "experiment";
  GeneratorSpec generator;
  Method method = Method::kNone;
  std::vector<double> epsilons;
  std::vector<std::size_t> original_sizes;
  // Smoothed histogram only: sizes of the drawn synthetic datasets.
  std::vector<std::size_t> synthetic_sizes;
  std::size_t repetitions = 200;
  double alpha = 0.05;
  TestKind test = TestKind::kMannWhitneyU;
  std::string variable = "value";
  std::uint64_t seed = 0;
  std::size_t min_feasible = 50;
  // Histogram binning for bivariate sources.
  BinningSpec binning = BinningSpec::gaussian_100();
  // Categories for the chi-squared test on a continuous variable. Defaults to
  // the variable's histogram binning.
  std::optional<BinningSpec> test_binning;
  std::size_t mwem_iterations = 10;
  std::size_t mwem_update_passes = 100;
  bool perturbed_normalized = false;
  double dp_delta = 1e-6;
  double dp_size_fraction = 0.65;
  std::size_t dp_null_samples = 10000;
  IpfOptions ipf;
  std::size_t workers = 1;

  // Parses the JSON schema documented in configs/README.md; relative paths
  // are resolved against `base_dir`. Loads referenced copula specs and CSV
  // files. Throws ConfigError naming the offending field.
  static ExperimentConfig from_json(std::string_view text,
                                    const std::string& base_dir = ".");
  static ExperimentConfig load(const std::string& path);

  // Effective configuration with every default filled in.
  std::string to_json() const;

  // Throws ConfigError on any inconsistency, including mixing the
  // synthetic-size grid (smoothed histogram) with other methods.
  void validate() const;

  bool multivariate() const;
  // Schema used by the marginal-based synthesizers.
  DiscreteSchema schema() const;
  // Histogram binning of `variable`.
  BinningSpec variable_binning() const;
};

struct CellSpec {
  Method method = Method::kNone;
  double epsilon = 0.0;
  std::size_t n_original = 0;
  std::size_t n_synthetic = 0;

  std::string key() const;
};

struct RepetitionOutcome {
  FailureReason failure = FailureReason::kNone;
  bool rejected = false;
  double p_value = 1.0;
};

enum class ErrorKind { kType1, kType2 };
std::string_view to_string(ErrorKind kind);

struct ErrorRateReport {
  std::string method;
  std::string test;
  std::string variable;
  double epsilon = 0.0;
  std::size_t n_original = 0;
  std::size_t n_synthetic = 0;
  std::size_t repetitions = 0;
  std::size_t feasible_count = 0;
  std::size_t rejections = 0;
  // Absent when no repetition was feasible.
  std::optional<double> error_rate;
  ErrorKind error_kind = ErrorKind::kType1;
  bool suppressed = false;
  // Set on every Type II report: it is only interpretable next to a valid
  // Type I rate for the same cell.
  bool type1_context = false;
  std::map<FailureReason, std::size_t> failures;
};

std::vector<CellSpec> expand_grid(const ExperimentConfig& config);

std::uint64_t cell_seed(const ExperimentConfig& config, const CellSpec& cell);

// The original dataset of repetition `rep` at size `n_original`.
GroupedDataset original_data(const ExperimentConfig& config,
                             std::size_t n_original, std::size_t rep);

RepetitionOutcome run_repetition(const ExperimentConfig& config,
                                 const CellSpec& cell, std::size_t rep);

// Runs `config.test` on `data` (column config.variable).
TestOutcome run_test(const ExperimentConfig& config, const GroupedDataset& data);

ErrorRateReport aggregate(const ExperimentConfig& config, const CellSpec& cell,
                          std::span<const RepetitionOutcome> outcomes);

ErrorRateReport run_cell(const ExperimentConfig& config, const CellSpec& cell,
                         std::size_t workers = 1);

// Every cell of the grid, in expand_grid order.
std::vector<ErrorRateReport> run_grid(const ExperimentConfig& config,
                                      std::size_t workers);

}  // namespace dpvalid

#endif  // DPVALID_HARNESS_H_
