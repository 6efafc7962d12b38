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

#include "dpvalid/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dpvalid/errors.h"

namespace dpvalid {

void PrivacyBudget::validate() const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw ArgumentError("privacy budget: epsilon must be positive and finite");
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw ArgumentError("privacy budget: delta must be in [0, 1)");
  }
}

void PrivacyBudget::validate_pure() const {
  validate();
  if (delta != 0.0) {
    throw ArgumentError("privacy budget: this mechanism is pure epsilon-DP (delta = 0)");
  }
}

void BudgetLedger::charge(std::string mechanism, double epsilon, double delta) {
  charges_.push_back({std::move(mechanism), epsilon, delta});
}

double BudgetLedger::spent_epsilon() const {
  double total = 0.0;
  for (const auto& c : charges_) total += c.epsilon;
  return total;
}

double BudgetLedger::spent_delta() const {
  double total = 0.0;
  for (const auto& c : charges_) total += c.delta;
  return total;
}

void BudgetLedger::require_exhausted() const {
  const double eps = spent_epsilon();
  const double del = spent_delta();
  if (std::fabs(eps - budget_.epsilon) > 1e-12 * budget_.epsilon ||
      std::fabs(del - budget_.delta) > 1e-12 * std::max(budget_.delta, 1e-300)) {
    throw std::logic_error("privacy ledger does not match the requested budget");
  }
}

std::string_view to_string(Synthesizer method) {
  switch (method) {
    case Synthesizer::kPerturbed:
      return "perturbed";
    case Synthesizer::kSmoothed:
      return "smoothed";
    case Synthesizer::kMwem:
      return "mwem";
    case Synthesizer::kMarginalIpf:
      return "marginal_ipf";
  }
  return "unknown";
}

Synthesizer parse_synthesizer(std::string_view text) {
  if (text == "perturbed") return Synthesizer::kPerturbed;
  if (text == "smoothed") return Synthesizer::kSmoothed;
  if (text == "mwem") return Synthesizer::kMwem;
  if (text == "marginal_ipf" || text == "ipf") return Synthesizer::kMarginalIpf;
  throw ArgumentError("unknown method '" + std::string(text) +
                      "' (expected perturbed, smoothed, mwem or marginal_ipf)");
}

namespace {

Provenance make_provenance(Synthesizer method, const PrivacyBudget& budget,
                           std::uint64_t seed, std::size_t original_n,
                           const GroupedDataset& data, const BudgetLedger& ledger) {
  ledger.require_exhausted();
  return Provenance{std::string(to_string(method)), budget.epsilon, seed,
                    original_n, data.size(), ledger.charges()};
}

// Largest-remainder rounding of `weights` to integers summing to `total`.
std::vector<std::int64_t> apportion(std::span<const std::int64_t> weights,
                                    std::int64_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0,
                                     [](double a, std::int64_t b) {
                                       return a + static_cast<double>(b);
                                     });
  std::vector<std::int64_t> out(weights.size(), 0);
  if (sum <= 0.0) return out;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double share = static_cast<double>(weights[i]) * static_cast<double>(total) / sum;
    out[i] = static_cast<std::int64_t>(std::floor(share));
    assigned += out[i];
    remainders.emplace_back(share - std::floor(share), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total && k < remainders.size(); ++k, ++assigned) {
    ++out[remainders[k].second];
  }
  return out;
}

}  // namespace

std::vector<std::int64_t> perturbed_counts(const GroupedHistogram& hist,
                                           const PrivacyBudget& budget,
                                           RandomSource& rng,
                                           const PerturbedOptions& options) {
  budget.validate_pure();
  const double scale = 2.0 / budget.epsilon;
  std::vector<std::int64_t> noisy(hist.counts.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    noisy[i] = std::max<std::int64_t>(
        0, hist.counts[i] + discrete_laplace_sample(scale, rng));
  }
  if (options.normalize_to_original) return apportion(noisy, hist.total_n);
  return noisy;
}

SyntheticDataset perturbed_histogram(const GroupedHistogram& hist,
                                     const PrivacyBudget& budget,
                                     RandomSource& rng,
                                     const PerturbedOptions& options) {
  const std::uint64_t seed = rng.seed();
  BudgetLedger ledger(budget);
  const auto noisy = perturbed_counts(hist, budget, rng, options);
  // Cells are disjoint, so one epsilon covers all of them.
  ledger.charge("discrete_laplace", budget.epsilon);
  GroupedDataset data = samples_from_counts(noisy, hist.spec);
  auto provenance = make_provenance(Synthesizer::kPerturbed, budget, seed,
                                    static_cast<std::size_t>(hist.total_n), data, ledger);
  return {std::move(data), std::move(provenance)};
}

std::vector<double> smoothed_probabilities(std::span<const std::int64_t> counts,
                                           std::size_t m, double epsilon) {
  if (m == 0) throw ArgumentError("smoothed histogram: m must be >= 1");
  if (!(epsilon > 0)) throw ArgumentError("smoothed histogram: epsilon must be > 0");
  if (counts.empty()) throw ArgumentError("smoothed histogram: no cells");
  const double alpha = 2.0 * static_cast<double>(m) / epsilon;
  std::vector<double> p(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw ArgumentError("smoothed histogram: negative count");
    p[i] = static_cast<double>(counts[i]) + alpha;
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> smoothed_probabilities_exponential(
    std::span<const std::int64_t> counts, std::size_t m, double epsilon) {
  if (m == 0) throw ArgumentError("smoothed histogram: m must be >= 1");
  if (!(epsilon > 0)) throw ArgumentError("smoothed histogram: epsilon must be > 0");
  if (counts.empty()) throw ArgumentError("smoothed histogram: no cells");
  const double two_m = 2.0 * static_cast<double>(m);
  const double alpha = two_m / epsilon;
  std::vector<double> log_weight(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw ArgumentError("smoothed histogram: negative count");
    const double score = alpha * std::log(static_cast<double>(counts[i]) + alpha);
    log_weight[i] = epsilon * score / two_m;
  }
  const double top = *std::max_element(log_weight.begin(), log_weight.end());
  std::vector<double> p(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(log_weight[i] - top);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

SyntheticDataset smoothed_histogram(const GroupedHistogram& hist,
                                    const PrivacyBudget& budget, std::size_t m,
                                    RandomSource& rng) {
  budget.validate_pure();
  if (m == 0) throw ArgumentError("smoothed histogram: m must be >= 1");
  const std::uint64_t seed = rng.seed();
  BudgetLedger ledger(budget);
  const auto probabilities = smoothed_probabilities(hist.counts, m, budget.epsilon);
  const CategoricalTable table(probabilities);
  std::vector<std::int64_t> drawn(hist.counts.size(), 0);
  for (std::size_t k = 0; k < m; ++k) ++drawn[table.sample(rng)];
  // m draws, each epsilon/m-DP through the exponential mechanism.
  ledger.charge("exponential_mechanism", budget.epsilon);
  GroupedDataset data = samples_from_counts(drawn, hist.spec);
  auto provenance = make_provenance(Synthesizer::kSmoothed, budget, seed,
                                    static_cast<std::size_t>(hist.total_n), data, ledger);
  return {std::move(data), std::move(provenance)};
}

namespace {

// Sole holder of the private counts inside MWEM.
class PrivateAnswers {
 public:
  PrivateAnswers(std::span<const double> counts,
                 const std::vector<Projection>& projections) {
    for (const auto& p : projections) answers_.push_back(p.apply(counts));
  }

  double answer(std::size_t marginal, std::size_t cell) {
    ++reads_;
    return answers_[marginal][cell];
  }

  // |true - approximate| for every query; one read per call.
  std::vector<std::vector<double>> errors(
      const std::vector<std::vector<double>>& approximate) {
    ++reads_;
    std::vector<std::vector<double>> out(answers_.size());
    for (std::size_t j = 0; j < answers_.size(); ++j) {
      out[j].resize(answers_[j].size());
      for (std::size_t c = 0; c < answers_[j].size(); ++c) {
        out[j][c] = std::fabs(answers_[j][c] - approximate[j][c]);
      }
    }
    return out;
  }

  std::size_t reads() const { return reads_; }

 private:
  std::vector<std::vector<double>> answers_;
  std::size_t reads_ = 0;
};

struct Measurement {
  std::vector<std::uint32_t> cells;
  double value;
};

}  // namespace

MwemFit mwem_fit(std::span<const double> counts, const JointDomain& domain,
                 const PrivacyBudget& budget, RandomSource& rng,
                 const MwemOptions& options) {
  budget.validate_pure();
  if (counts.size() != domain.cell_count()) {
    throw ArgumentError("mwem: counts do not match the domain");
  }
  const std::size_t iterations = options.iterations;
  if (iterations == 0) throw ArgumentError("mwem: iterations must be >= 1");

  std::vector<Marginal> workload = options.workload;
  if (workload.empty()) {
    Marginal full;
    for (std::size_t a = 0; a < domain.attribute_count(); ++a) full.attributes.push_back(a);
    workload.push_back(std::move(full));
  }
  std::vector<Projection> projections;
  std::size_t query_count = 0;
  for (const auto& m : workload) {
    projections.emplace_back(domain, m);
    query_count += projections.back().size();
  }
  if (iterations > query_count) {
    throw ArgumentError("mwem: iterations (" + std::to_string(iterations) +
                        ") exceed the number of queries (" +
                        std::to_string(query_count) + ")");
  }

  // The dataset size is public.
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (!(n > 0)) throw ArgumentError("mwem: empty histogram");
  PrivateAnswers private_answers(counts, projections);

  BudgetLedger ledger(budget);
  const double per_iteration = budget.epsilon / static_cast<double>(iterations);
  const double select_epsilon = per_iteration / 2.0;
  const double measure_epsilon = per_iteration / 2.0;

  const std::size_t cells = domain.cell_count();
  std::vector<double> weights(cells, 1.0 / static_cast<double>(cells));
  std::vector<std::vector<bool>> measured(projections.size());
  for (std::size_t j = 0; j < projections.size(); ++j) {
    measured[j].assign(projections[j].size(), false);
  }
  std::vector<Measurement> measurements;
  MwemFit fit;

  for (std::size_t t = 0; t < iterations; ++t) {
    // Exponential mechanism over unmeasured queries, score sensitivity 1.
    std::vector<std::vector<double>> approximate(projections.size());
    for (std::size_t j = 0; j < projections.size(); ++j) {
      approximate[j] = projections[j].apply(weights);
      for (double& v : approximate[j]) v *= n;
    }
    const auto errors = private_answers.errors(approximate);
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    std::vector<double> log_weight;
    for (std::size_t j = 0; j < errors.size(); ++j) {
      for (std::size_t c = 0; c < errors[j].size(); ++c) {
        if (measured[j][c]) continue;
        candidates.emplace_back(j, c);
        log_weight.push_back(select_epsilon * errors[j][c] / 2.0);
      }
    }
    const double top = *std::max_element(log_weight.begin(), log_weight.end());
    for (double& w : log_weight) w = std::exp(w - top);
    const auto [marginal, cell] = candidates[categorical_sample(log_weight, rng)];
    ledger.charge("exponential_mechanism", select_epsilon);
    measured[marginal][cell] = true;

    const double noisy = private_answers.answer(marginal, cell) +
                         laplace_sample(1.0 / measure_epsilon, rng);
    ledger.charge("laplace", measure_epsilon);
    measurements.push_back({projections[marginal].cells_of(cell), noisy});
    fit.selected.emplace_back(marginal, cell);
    fit.measurements.push_back(noisy);

    // Multiplicative weights on unnormalized mass; `total` tracks the sum.
    double total = 1.0;
    for (std::size_t pass = 0; pass < options.update_passes; ++pass) {
      for (const auto& m : measurements) {
        double mass = 0.0;
        for (auto c : m.cells) mass += weights[c];
        const double exponent =
            std::clamp((m.value - n * mass / total) / (2.0 * n), -700.0, 700.0);
        const double factor = std::exp(exponent);
        for (auto c : m.cells) weights[c] *= factor;
        total += mass * (factor - 1.0);
        if (!(total > 1e-200 && total < 1e200)) {
          total = std::accumulate(weights.begin(), weights.end(), 0.0);
          for (double& w : weights) w /= total;
          total = 1.0;
        }
      }
      total = std::accumulate(weights.begin(), weights.end(), 0.0);
    }
    total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= total;
    fit.history.push_back(weights);
  }
  ledger.require_exhausted();
  fit.distribution = std::move(weights);
  fit.private_reads = private_answers.reads();
  fit.charges = ledger.charges();
  return fit;
}

namespace {

std::vector<std::size_t> sample_cells(std::span<const double> distribution,
                                      std::size_t count, RandomSource& rng) {
  std::vector<std::size_t> cells(count);
  if (count == 0) return cells;
  const CategoricalTable table(distribution);
  for (auto& c : cells) c = table.sample(rng);
  return cells;
}

}  // namespace

SyntheticDataset mwem(const GroupedHistogram& hist, const PrivacyBudget& budget,
                      RandomSource& rng, const MwemOptions& options) {
  const std::uint64_t seed = rng.seed();
  const JointDomain domain({2, hist.bin_count()});
  std::vector<double> counts(hist.counts.begin(), hist.counts.end());
  auto fit = mwem_fit(counts, domain, budget, rng, options);
  const auto cells =
      sample_cells(fit.distribution, static_cast<std::size_t>(hist.total_n), rng);
  GroupedDataset data = decode_cells(cells, DiscreteSchema::bivariate(hist.spec));
  return {std::move(data),
          Provenance{"mwem", budget.epsilon, seed,
                     static_cast<std::size_t>(hist.total_n), cells.size(), fit.charges}};
}

SyntheticDataset mwem(const GroupedDataset& data, const DiscreteSchema& schema,
                      const PrivacyBudget& budget, RandomSource& rng,
                      MwemOptions options) {
  const std::uint64_t seed = rng.seed();
  const JointDomain domain = schema.domain();
  if (options.workload.empty()) {
    options.workload = one_and_two_way_marginals(domain.attribute_count());
  }
  const auto counts = joint_counts(data, schema);
  auto fit = mwem_fit(counts, domain, budget, rng, options);
  const auto cells = sample_cells(fit.distribution, data.size(), rng);
  GroupedDataset out = decode_cells(cells, schema);
  return {std::move(out), Provenance{"mwem", budget.epsilon, seed, data.size(),
                                     cells.size(), fit.charges}};
}

IpfFit fit_ipf(const JointDomain& domain, std::span<const Marginal> marginals,
               std::span<const std::vector<double>> targets,
               const IpfOptions& options) {
  if (marginals.empty()) throw ArgumentError("ipf: no marginals");
  if (marginals.size() != targets.size()) {
    throw ArgumentError("ipf: one target per marginal required");
  }
  std::vector<Projection> projections;
  for (std::size_t j = 0; j < marginals.size(); ++j) {
    projections.emplace_back(domain, marginals[j]);
    if (targets[j].size() != projections.back().size()) {
      throw ArgumentError("ipf: target size does not match its marginal");
    }
  }
  const std::size_t cells = domain.cell_count();
  IpfFit fit;
  fit.joint.assign(cells, 1.0 / static_cast<double>(cells));
  std::vector<double> previous;
  auto marginal_error = [&]() {
    double worst = 0.0;
    for (std::size_t j = 0; j < projections.size(); ++j) {
      const auto current = projections[j].apply(fit.joint);
      for (std::size_t c = 0; c < current.size(); ++c) {
        worst = std::max(worst, std::fabs(current[c] - targets[j][c]));
      }
    }
    return worst;
  };
  std::vector<double> scaled(cells);
  for (fit.sweeps = 0; fit.sweeps < options.max_sweeps;) {
    previous = fit.joint;
    for (std::size_t j = 0; j < projections.size(); ++j) {
      const auto current = projections[j].apply(fit.joint);
      std::vector<double> ratio(current.size(), 0.0);
      for (std::size_t c = 0; c < current.size(); ++c) {
        if (current[c] > 0.0) ratio[c] = targets[j][c] / current[c];
      }
      double mass = 0.0;
      for (std::size_t cell = 0; cell < cells; ++cell) {
        scaled[cell] = fit.joint[cell] * ratio[projections[j][cell]];
        mass += scaled[cell];
      }
      // Targets whose support misses the current joint entirely would wipe
      // out all mass; such a step is skipped.
      if (!(mass > 0.0)) continue;
      for (std::size_t cell = 0; cell < cells; ++cell) {
        fit.joint[cell] = scaled[cell] / mass;
      }
    }
    ++fit.sweeps;
    fit.max_marginal_error = marginal_error();
    if (fit.max_marginal_error <= options.tolerance) {
      fit.converged = true;
      break;
    }
    double change = 0.0;
    for (std::size_t cell = 0; cell < cells; ++cell) {
      change = std::max(change, std::fabs(fit.joint[cell] - previous[cell]));
    }
    if (change <= options.stagnation) break;
  }
  return fit;
}

MarginalIpfResult marginal_ipf(const GroupedDataset& data,
                               const DiscreteSchema& schema,
                               const PrivacyBudget& budget,
                               std::span<const Marginal> marginals,
                               RandomSource& rng, const IpfOptions& options) {
  budget.validate_pure();
  if (marginals.empty()) throw ArgumentError("marginal_ipf: no marginals selected");
  const std::uint64_t seed = rng.seed();
  const JointDomain domain = schema.domain();
  std::vector<bool> covered(domain.attribute_count(), false);
  for (const auto& m : marginals) {
    for (auto a : m.attributes) {
      if (a >= covered.size()) throw ArgumentError("marginal_ipf: attribute out of range");
      covered[a] = true;
    }
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
    throw ArgumentError("marginal_ipf: every variable must appear in a marginal");
  }
  const auto counts = joint_counts(data, schema);

  BudgetLedger ledger(budget);
  const double per_marginal = budget.epsilon / static_cast<double>(marginals.size());
  const double scale = 2.0 / per_marginal;
  std::vector<std::vector<double>> targets;
  for (const auto& m : marginals) {
    auto noisy = Projection(domain, m).apply(counts);
    double total = 0.0;
    for (double& v : noisy) {
      v = std::max(0.0, v + laplace_sample(scale, rng));
      total += v;
    }
    if (total > 0.0) {
      for (double& v : noisy) v /= total;
    } else {
      std::fill(noisy.begin(), noisy.end(), 1.0 / static_cast<double>(noisy.size()));
    }
    targets.push_back(std::move(noisy));
    ledger.charge("laplace", per_marginal);
  }
  ledger.require_exhausted();

  IpfFit fit = fit_ipf(domain, marginals, targets, options);
  const auto cells = sample_cells(fit.joint, data.size(), rng);
  GroupedDataset out = decode_cells(cells, schema);
  Provenance provenance{"marginal_ipf", budget.epsilon, seed, data.size(),
                        cells.size(), ledger.charges()};
  return {SyntheticDataset{std::move(out), std::move(provenance)}, std::move(fit)};
}

}  // namespace dpvalid
