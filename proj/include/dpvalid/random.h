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

#ifndef DPVALID_RANDOM_H_
#define DPVALID_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace dpvalid {

// 64-bit mixing function (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

// Key for the child stream `index` of `seed`. Distinct indices give
// statistically independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Stable 64-bit hash of a string (FNV-1a folded through mix64). Used to turn
// textual cell keys into stream indices.
std::uint64_t hash_string(std::string_view text);

// Counter-based generator: the i-th output is mix64(key + i * golden).
// Satisfies UniformRandomBitGenerator. Not safe for concurrent use; give each
// task its own child().
class RandomSource {
 public:
  using result_type = std::uint64_t;

  explicit RandomSource(std::uint64_t seed) : seed_(seed), state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return next(); }
  std::uint64_t next();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1], safe as a log() argument.
  double uniform_open_zero();
  // Uniform integer on [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t seed() const { return seed_; }
  RandomSource child(std::uint64_t index) const {
    return RandomSource(derive_seed(seed_, index));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

// Continuous Laplace(0, scale). Throws ArgumentError unless scale > 0.
double laplace_sample(double scale, RandomSource& rng);

// Two-sided geometric (discrete Laplace) with P(K=k) proportional to
// exp(-|k|/scale), sampled as the difference of two geometric variates.
std::int64_t discrete_laplace_sample(double scale, RandomSource& rng);

// Closed-form pmf of discrete_laplace_sample.
double discrete_laplace_pmf(std::int64_t k, double scale);

double gaussian_sample(double mu, double sigma, RandomSource& rng);

// Index i with probability weights[i] / sum(weights).
std::size_t categorical_sample(std::span<const double> weights,
                               RandomSource& rng);

// Precomputed cumulative table for repeated categorical draws.
class CategoricalTable {
 public:
  explicit CategoricalTable(std::span<const double> weights);

  std::size_t sample(RandomSource& rng) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

// In-place Fisher-Yates shuffle driven by `rng` (stdlib-independent).
template <typename T>
void shuffle(std::span<T> items, RandomSource& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace dpvalid

#endif  // DPVALID_RANDOM_H_
