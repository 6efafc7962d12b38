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

#include "dpvalid/simgen.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dpvalid/errors.h"
#include "dpvalid/special_functions.h"
#include "json.hpp"

namespace dpvalid {

using nlohmann::json;

std::string_view to_string(SimulationMode mode) {
  return mode == SimulationMode::kNull ? "null" : "signal";
}

SimulationMode parse_simulation_mode(std::string_view text) {
  if (text == "null") return SimulationMode::kNull;
  if (text == "signal") return SimulationMode::kSignal;
  throw ArgumentError("unknown mode '" + std::string(text) +
                      "' (expected null or signal)");
}

GroupedDataset gaussian_bivariate(std::size_t n, SimulationMode mode,
                                  RandomSource& rng) {
  if (n < 2 || n % 2 != 0) {
    throw ArgumentError("gaussian_bivariate: n must be even and >= 2");
  }
  const std::size_t half = n / 2;
  const bool signal = mode == SimulationMode::kSignal;
  GroupedDataset data;
  data.reserve(n);
  for (std::size_t i = 0; i < half; ++i) {
    data.add(0, signal ? gaussian_sample(51.0, 1.0, rng)
                       : gaussian_sample(50.0, 2.0, rng));
  }
  for (std::size_t i = 0; i < half; ++i) {
    data.add(1, signal ? gaussian_sample(50.0, 1.0, rng)
                       : gaussian_sample(50.0, 2.0, rng));
  }
  return data;
}

double transform_latent(const MarginalDistribution& marginal, double latent) {
  struct Visitor {
    double z;
    double operator()(const NormalMarginal& m) const { return m.mu + m.sigma * z; }
    double operator()(const ScaledBetaMarginal& m) const {
      const double u = normal_cdf(z);
      return m.lo + (m.hi - m.lo) * inverse_regularized_incomplete_beta(m.a, m.b, u);
    }
    double operator()(const BernoulliMarginal& m) const {
      return normal_cdf(z) >= 1.0 - m.p ? 1.0 : 0.0;
    }
    double operator()(const OrdinalMarginal& m) const {
      const double u = normal_cdf(z);
      double cumulative = 0.0;
      for (std::size_t k = 0; k + 1 < m.probabilities.size(); ++k) {
        cumulative += m.probabilities[k];
        if (u < cumulative) return m.values[k];
      }
      return m.values.back();
    }
  };
  return std::visit(Visitor{latent}, marginal);
}

std::vector<double> cholesky(const std::vector<double>& matrix, std::size_t dim) {
  if (matrix.size() != dim * dim) throw ArgumentError("cholesky: shape mismatch");
  std::vector<double> lower(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = matrix[i * dim + j];
      for (std::size_t k = 0; k < j; ++k) sum -= lower[i * dim + k] * lower[j * dim + k];
      if (i == j) {
        if (!(sum > 1e-12)) {
          throw ArgumentError("correlation matrix is not positive-definite");
        }
        lower[i * dim + i] = std::sqrt(sum);
      } else {
        lower[i * dim + j] = sum / lower[j * dim + j];
      }
    }
  }
  return lower;
}

namespace {

void validate_marginal(const MarginalDistribution& marginal, const std::string& name) {
  auto fail = [&](const std::string& what) {
    throw ArgumentError("variable '" + name + "': " + what);
  };
  if (const auto* m = std::get_if<NormalMarginal>(&marginal)) {
    if (!(m->sigma > 0)) fail("normal sigma must be > 0");
  } else if (const auto* m = std::get_if<ScaledBetaMarginal>(&marginal)) {
    if (!(m->a > 0 && m->b > 0)) fail("beta shape parameters must be > 0");
    if (!(m->hi > m->lo)) fail("scaled beta needs hi > lo");
  } else if (const auto* m = std::get_if<BernoulliMarginal>(&marginal)) {
    if (!(m->p >= 0 && m->p <= 1)) fail("bernoulli p must be in [0, 1]");
  } else if (const auto* m = std::get_if<OrdinalMarginal>(&marginal)) {
    if (m->probabilities.size() < 2) fail("ordinal needs at least two categories");
    if (m->values.size() != m->probabilities.size()) {
      fail("ordinal values and probabilities differ in length");
    }
    double total = 0.0;
    for (double p : m->probabilities) {
      if (!(p >= 0)) fail("ordinal probabilities must be >= 0");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) fail("ordinal probabilities must sum to 1");
  }
}

template <typename T>
T field(const json& object, const char* key, const std::string& path) {
  if (!object.contains(key)) throw ConfigError(path + "." + key, "missing");
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "." + key, "wrong type");
  }
}

template <typename T>
T field_or(const json& object, const char* key, T fallback, const std::string& path) {
  return object.contains(key) ? field<T>(object, key, path) : fallback;
}

MarginalDistribution parse_marginal(const json& object, const std::string& path) {
  if (!object.is_object()) throw ConfigError(path, "must be an object");
  const auto type = field<std::string>(object, "type", path);
  if (type == "normal") {
    return NormalMarginal{field<double>(object, "mu", path),
                          field<double>(object, "sigma", path)};
  }
  if (type == "scaled_beta") {
    return ScaledBetaMarginal{field<double>(object, "a", path),
                              field<double>(object, "b", path),
                              field_or<double>(object, "lo", 0.0, path),
                              field_or<double>(object, "hi", 1.0, path)};
  }
  if (type == "bernoulli") return BernoulliMarginal{field<double>(object, "p", path)};
  if (type == "ordinal") {
    OrdinalMarginal m;
    m.probabilities = field<std::vector<double>>(object, "probabilities", path);
    if (object.contains("values")) {
      m.values = field<std::vector<double>>(object, "values", path);
    } else {
      for (std::size_t k = 0; k < m.probabilities.size(); ++k) {
        m.values.push_back(static_cast<double>(k + 1));
      }
    }
    return m;
  }
  throw ConfigError(path + ".type", "unknown marginal type '" + type + "'");
}

// Applies the keys of `overrides` on top of `base` (same marginal type).
MarginalDistribution apply_overrides(const MarginalDistribution& base,
                                     const json& overrides, const std::string& path) {
  if (!overrides.is_object()) throw ConfigError(path, "must be an object");
  MarginalDistribution out = base;
  if (auto* m = std::get_if<NormalMarginal>(&out)) {
    m->mu = field_or(overrides, "mu", m->mu, path);
    m->sigma = field_or(overrides, "sigma", m->sigma, path);
  } else if (auto* m = std::get_if<ScaledBetaMarginal>(&out)) {
    m->a = field_or(overrides, "a", m->a, path);
    m->b = field_or(overrides, "b", m->b, path);
    m->lo = field_or(overrides, "lo", m->lo, path);
    m->hi = field_or(overrides, "hi", m->hi, path);
  } else if (auto* m = std::get_if<BernoulliMarginal>(&out)) {
    m->p = field_or(overrides, "p", m->p, path);
  } else if (auto* m = std::get_if<OrdinalMarginal>(&out)) {
    m->probabilities = field_or(overrides, "probabilities", m->probabilities, path);
  }
  return out;
}

BinningSpec default_binning(const MarginalDistribution& marginal) {
  if (std::holds_alternative<BernoulliMarginal>(marginal)) {
    return BinningSpec::integer_centered(0, 1);
  }
  if (const auto* m = std::get_if<OrdinalMarginal>(&marginal)) {
    std::vector<double> edges;
    const auto& v = m->values;
    edges.push_back(v.front() - 0.5);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) edges.push_back(0.5 * (v[k] + v[k + 1]));
    edges.push_back(v.back() + 0.5);
    return BinningSpec::from_edges(std::move(edges));
  }
  if (const auto* m = std::get_if<ScaledBetaMarginal>(&marginal)) {
    return BinningSpec::uniform(m->lo, m->hi, 10);
  }
  const auto& n = std::get<NormalMarginal>(marginal);
  return BinningSpec::uniform(n.mu - 3 * n.sigma, n.mu + 3 * n.sigma, 10);
}

}  // namespace

CopulaSpec CopulaSpec::from_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("", "copula spec must be a JSON object");
  if (!root.contains("variables") || !root["variables"].is_array() ||
      root["variables"].empty()) {
    throw ConfigError("variables", "must be a non-empty array");
  }
  CopulaSpec spec;
  for (std::size_t i = 0; i < root["variables"].size(); ++i) {
    const auto& v = root["variables"][i];
    const std::string path = "variables[" + std::to_string(i) + "]";
    if (!v.is_object()) throw ConfigError(path, "must be an object");
    CopulaVariable var;
    var.name = field<std::string>(v, "name", path);
    if (!v.contains("marginal")) throw ConfigError(path + ".marginal", "missing");
    var.low_risk = parse_marginal(v["marginal"], path + ".marginal");
    var.high_risk = var.low_risk;
    try {
      var.binning = v.contains("binning")
                        ? BinningSpec::parse(field<std::string>(v, "binning", path))
                        : default_binning(var.low_risk);
    } catch (const ArgumentError& e) {
      throw ConfigError(path + ".binning", e.what());
    }
    spec.variables.push_back(std::move(var));
  }
  const std::size_t dim = spec.variables.size();
  if (root.contains("correlation")) {
    const auto rows = field<std::vector<std::vector<double>>>(root, "correlation", "");
    if (rows.size() != dim) throw ConfigError("correlation", "must be square, one row per variable");
    for (const auto& row : rows) {
      if (row.size() != dim) throw ConfigError("correlation", "must be square, one row per variable");
      spec.correlation.insert(spec.correlation.end(), row.begin(), row.end());
    }
  } else {
    spec.correlation.assign(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) spec.correlation[i * dim + i] = 1.0;
  }
  if (root.contains("class_effect")) {
    const auto& effects = root["class_effect"];
    if (!effects.is_object()) throw ConfigError("class_effect", "must be an object");
    for (auto it = effects.begin(); it != effects.end(); ++it) {
      bool found = false;
      for (auto& var : spec.variables) {
        if (var.name == it.key()) {
          var.high_risk = apply_overrides(var.low_risk, it.value(), "class_effect." + it.key());
          found = true;
        }
      }
      if (!found) throw ConfigError("class_effect." + it.key(), "unknown variable");
    }
  }
  try {
    spec.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError("", e.what());
  }
  return spec;
}

CopulaSpec CopulaSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open copula spec '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

void CopulaSpec::validate() const {
  const std::size_t dim = variables.size();
  if (dim == 0) throw ArgumentError("copula spec: no variables");
  for (std::size_t i = 0; i < dim; ++i) {
    const auto& v = variables[i];
    if (v.name.empty() || v.name == "group") {
      throw ArgumentError("copula spec: invalid variable name '" + v.name + "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (variables[j].name == v.name) {
        throw ArgumentError("copula spec: duplicate variable '" + v.name + "'");
      }
    }
    validate_marginal(v.low_risk, v.name);
    validate_marginal(v.high_risk, v.name);
    if (v.low_risk.index() != v.high_risk.index()) {
      throw ArgumentError("variable '" + v.name + "': class parameters change the marginal type");
    }
  }
  if (correlation.size() != dim * dim) {
    throw ArgumentError("copula spec: correlation must be dim x dim");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (std::fabs(correlation[i * dim + i] - 1.0) > 1e-12) {
      throw ArgumentError("copula spec: correlation diagonal must be 1");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (std::fabs(correlation[i * dim + j] - correlation[j * dim + i]) > 1e-12) {
        throw ArgumentError("copula spec: correlation must be symmetric");
      }
    }
  }
  cholesky(correlation, dim);
}

DiscreteSchema CopulaSpec::schema() const {
  DiscreteSchema schema;
  for (const auto& v : variables) {
    schema.columns.push_back(v.name);
    schema.binnings.push_back(v.binning);
  }
  return schema;
}

GroupedDataset copula_multivariate(const CopulaSpec& spec, std::size_t n,
                                   SimulationMode mode, RandomSource& rng) {
  if (n < 2 || n % 2 != 0) {
    throw ArgumentError("copula_multivariate: n must be even and >= 2");
  }
  spec.validate();
  const std::size_t dim = spec.variables.size();
  const auto lower = cholesky(spec.correlation, dim);

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i < n / 2 ? 0 : 1;
  if (mode == SimulationMode::kNull) shuffle(std::span<int>(labels), rng);

  std::vector<std::string> names;
  for (const auto& v : spec.variables) names.push_back(v.name);
  GroupedDataset data(names);
  data.reserve(n);
  std::vector<double> independent(dim);
  std::vector<double> row(dim);
  for (std::size_t r = 0; r < n; ++r) {
    // Null mode: every record uses class-0 parameters; labels carry no signal.
    const bool high = mode == SimulationMode::kSignal && labels[r] == 1;
    for (auto& z : independent) z = gaussian_sample(0.0, 1.0, rng);
    for (std::size_t i = 0; i < dim; ++i) {
      double latent = 0.0;
      for (std::size_t k = 0; k <= i; ++k) latent += lower[i * dim + k] * independent[k];
      const auto& var = spec.variables[i];
      row[i] = transform_latent(high ? var.high_risk : var.low_risk, latent);
    }
    data.add(labels[r], row);
  }
  return data;
}

}  // namespace dpvalid
