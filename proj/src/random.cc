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

#include "dpvalid/random.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dpvalid/errors.h"

namespace dpvalid {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed ^ 0x5851f42d4c957f2dULL) + mix64(index + kGolden));
}

std::uint64_t hash_string(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

std::uint64_t RandomSource::next() {
  state_ += kGolden;
  return mix64(state_);
}

double RandomSource::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform_open_zero() {
  return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t RandomSource::below(std::uint64_t bound) {
  if (bound == 0) throw ArgumentError("RandomSource::below: bound must be > 0");
  // Lemire's nearly-divisionless rejection.
  unsigned __int128 product =
      static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

double laplace_sample(double scale, RandomSource& rng) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    throw ArgumentError("laplace_sample: scale must be positive, got " +
                        std::to_string(scale));
  }
  const std::uint64_t bits = rng.next();
  const double exponential =
      -std::log(static_cast<double>((bits >> 11) + 1) * 0x1.0p-53);
  // The low bit is independent of the 53 bits used above.
  return (bits & 1U) ? scale * exponential : -scale * exponential;
}

std::int64_t discrete_laplace_sample(double scale, RandomSource& rng) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    throw ArgumentError("discrete_laplace_sample: scale must be positive, got " +
                        std::to_string(scale));
  }
  // Geometric on {0,1,...} with P(G >= k) = exp(-k/scale).
  auto geometric = [&]() {
    return static_cast<std::int64_t>(
        std::floor(-scale * std::log(rng.uniform_open_zero())));
  };
  const std::int64_t a = geometric();
  const std::int64_t b = geometric();
  return a - b;
}

double discrete_laplace_pmf(std::int64_t k, double scale) {
  if (!(scale > 0)) throw ArgumentError("discrete_laplace_pmf: scale <= 0");
  const double t = 1.0 / scale;
  // (e^t - 1)/(e^t + 1) = tanh(t/2).
  return std::tanh(t / 2.0) * std::exp(-t * std::abs(static_cast<double>(k)));
}

double gaussian_sample(double mu, double sigma, RandomSource& rng) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    throw ArgumentError("gaussian_sample: sigma must be positive, got " +
                        std::to_string(sigma));
  }
  // Box-Muller, one variate per call.
  const double radius = std::sqrt(-2.0 * std::log(rng.uniform_open_zero()));
  const double angle = 2.0 * std::numbers::pi * rng.uniform();
  return mu + sigma * radius * std::cos(angle);
}

namespace {

std::vector<double> cumulative_weights(std::span<const double> weights) {
  if (weights.empty()) throw ArgumentError("categorical: empty weight list");
  std::vector<double> cumulative;
  cumulative.reserve(weights.size());
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) {
      throw ArgumentError("categorical: weights must be finite and >= 0");
    }
    total += w;
    cumulative.push_back(total);
  }
  if (!(total > 0)) throw ArgumentError("categorical: all weights are zero");
  return cumulative;
}

std::size_t search(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  auto index = static_cast<std::size_t>(it - cumulative.begin());
  // Guard against target == total after rounding; step back over zero-width
  // cells so a zero weight is never returned.
  if (index >= cumulative.size()) index = cumulative.size() - 1;
  while (index > 0 && cumulative[index] == cumulative[index - 1]) --index;
  return index;
}

}  // namespace

std::size_t categorical_sample(std::span<const double> weights,
                               RandomSource& rng) {
  return search(cumulative_weights(weights), rng.uniform());
}

CategoricalTable::CategoricalTable(std::span<const double> weights)
    : cumulative_(cumulative_weights(weights)) {}

std::size_t CategoricalTable::sample(RandomSource& rng) const {
  return search(cumulative_, rng.uniform());
}

}  // namespace dpvalid
