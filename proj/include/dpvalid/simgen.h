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

#ifndef DPVALID_SIMGEN_H_
#define DPVALID_SIMGEN_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dpvalid/dataset.h"
#include "dpvalid/joint.h"
#include "dpvalid/random.h"

namespace dpvalid {

enum class SimulationMode { kNull, kSignal };

std::string_view to_string(SimulationMode mode);
SimulationMode parse_simulation_mode(std::string_view text);

// n/2 records per group. Null: both groups N(50, 2). Signal: group 0 ~
// N(51, 1), group 1 ~ N(50, 1).
GroupedDataset gaussian_bivariate(std::size_t n, SimulationMode mode,
                                  RandomSource& rng);

struct NormalMarginal {
  double mu = 0.0;
  double sigma = 1.0;
};
// Beta(a, b) stretched onto [lo, hi].
struct ScaledBetaMarginal {
  double a = 1.0;
  double b = 1.0;
  double lo = 0.0;
  double hi = 1.0;
};
struct BernoulliMarginal {
  double p = 0.5;
};
// Category k (value values[k]) with probability probabilities[k].
struct OrdinalMarginal {
  std::vector<double> probabilities;
  std::vector<double> values;
};

using MarginalDistribution =
    std::variant<NormalMarginal, ScaledBetaMarginal, BernoulliMarginal,
                 OrdinalMarginal>;

// Maps a standard-normal latent value through the marginal's inverse CDF.
double transform_latent(const MarginalDistribution& marginal, double latent);

struct CopulaVariable {
  std::string name;
  MarginalDistribution low_risk;
  // Class-1 parameters; equal to low_risk unless overridden.
  MarginalDistribution high_risk;
  // Discretization used by histogram and marginal synthesizers.
  BinningSpec binning = BinningSpec::integer_centered(0, 1);
};

struct CopulaSpec {
  std::vector<CopulaVariable> variables;
  // Row-major, variables.size() squared.
  std::vector<double> correlation;

  // Parses the JSON schema documented in configs/README.md. Throws
  // ConfigError naming the offending field.
  static CopulaSpec from_json(std::string_view text);
  static CopulaSpec load(const std::string& path);

  // Throws ArgumentError on a malformed spec, including a correlation matrix
  // that is not symmetric positive-definite with unit diagonal.
  void validate() const;
  DiscreteSchema schema() const;
};

// Lower-triangular L with L L^T = matrix (row-major, dim x dim). Throws
// ArgumentError if the matrix is not positive-definite.
std::vector<double> cholesky(const std::vector<double>& matrix, std::size_t dim);

// Latent correlated normals mapped through the marginals. Signal: n/2
// records from each class's parameters. Null: all records from the class-0
// parameters, labels split exactly n/2 : n/2 at random.
GroupedDataset copula_multivariate(const CopulaSpec& spec, std::size_t n,
                                   SimulationMode mode, RandomSource& rng);

}  // namespace dpvalid

#endif  // DPVALID_SIMGEN_H_
