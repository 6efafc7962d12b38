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

#include "dpvalid/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "dpvalid/dp_mann_whitney.h"
#include "dpvalid/errors.h"
#include "dpvalid/text.h"
#include "json.hpp"

namespace dpvalid {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kNone: return "none";
    case Method::kPerturbed: return "perturbed";
    case Method::kSmoothed: return "smoothed";
    case Method::kMwem: return "mwem";
    case Method::kMarginalIpf: return "marginal_ipf";
    case Method::kDpMannWhitney: return "dp_mw_baseline";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "none" || text == "baseline") return Method::kNone;
  if (text == "dp_mw_baseline" || text == "dp_mw") return Method::kDpMannWhitney;
  switch (parse_synthesizer(text)) {
    case Synthesizer::kPerturbed: return Method::kPerturbed;
    case Synthesizer::kSmoothed: return Method::kSmoothed;
    case Synthesizer::kMwem: return Method::kMwem;
    case Synthesizer::kMarginalIpf: return Method::kMarginalIpf;
  }
  throw ArgumentError("unknown method '" + std::string(text) + "'");
}

std::string_view to_string(ErrorKind kind) {
  return kind == ErrorKind::kType1 ? "type1" : "type2";
}

// ---------------------------------------------------------------------------
// Configuration.

namespace {

template <typename T>
T get(const json& object, const char* key, const std::string& path) {
  try {
    return object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path.empty() ? key : path + "." + key, "wrong type");
  }
}

template <typename T>
void read_into(const json& object, const char* key, T& target,
               const std::string& path = "") {
  if (object.contains(key)) target = get<T>(object, key, path);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

BinningSpec parse_binning_field(const json& object, const char* key,
                                const std::string& path) {
  const auto text = get<std::string>(object, key, path);
  try {
    return BinningSpec::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(path.empty() ? key : path + "." + key, e.what());
  }
}

void parse_generator(const json& g, const std::string& base_dir,
                     GeneratorSpec& out) {
  if (!g.is_object()) throw ConfigError("generator", "must be an object");
  const auto kind = g.contains("kind") ? get<std::string>(g, "kind", "generator")
                                       : std::string("gaussian");
  auto parse_mode = [&] {
    if (!g.contains("mode")) return SimulationMode::kNull;
    try {
      return parse_simulation_mode(get<std::string>(g, "mode", "generator"));
    } catch (const ArgumentError& e) {
      throw ConfigError("generator.mode", e.what());
    }
  };
  if (kind == "gaussian") {
    out.kind = GeneratorSpec::Kind::kGaussian;
    out.mode = parse_mode();
  } else if (kind == "copula") {
    out.kind = GeneratorSpec::Kind::kCopula;
    out.mode = parse_mode();
    if (!g.contains("spec")) throw ConfigError("generator.spec", "missing");
    const auto& spec = g.at("spec");
    try {
      if (spec.is_string()) {
        out.copula_path = resolve(base_dir, spec.get<std::string>());
        out.copula = CopulaSpec::load(out.copula_path);
      } else {
        out.copula = CopulaSpec::from_json(spec.dump());
      }
    } catch (const ConfigError& e) {
      throw ConfigError("generator.spec" + (e.field().empty() ? "" : "." + e.field()),
                        e.what());
    } catch (const IoError& e) {
      throw ConfigError("generator.spec", e.what());
    }
  } else if (kind == "csv") {
    out.kind = GeneratorSpec::Kind::kCsv;
    if (!g.contains("path")) throw ConfigError("generator.path", "missing");
    out.csv_path = resolve(base_dir, get<std::string>(g, "path", "generator"));
    read_into(g, "format", out.csv_format, "generator");
    if (out.csv_format != "grouped" && out.csv_format != "cardio") {
      throw ConfigError("generator.format", "must be 'grouped' or 'cardio'");
    }
    if (g.contains("truth")) {
      const auto truth = get<std::string>(g, "truth", "generator");
      if (truth != "null" && truth != "signal") {
        throw ConfigError("generator.truth", "must be 'null' or 'signal'");
      }
      out.csv_null_truth = truth == "null";
    }
    try {
      out.csv_data = out.csv_format == "cardio" ? load_cardio_csv(out.csv_path)
                                                : read_grouped_csv(out.csv_path);
    } catch (const IngestionError& e) {
      throw ConfigError("generator.path", e.what());
    } catch (const IoError& e) {
      throw ConfigError("generator.path", e.what());
    }
  } else {
    throw ConfigError("generator.kind", "must be 'gaussian', 'copula' or 'csv'");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(std::string_view text,
                                             const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("", "config must be a JSON object");

  static const char* const kKnown[] = {
      "name", "generator", "synthesizer", "epsilons", "original_sizes",
      "synthetic_sizes", "repetitions", "alpha", "test", "variable", "seed",
      "min_feasible", "binning", "test_binning", "mwem", "perturbed", "dp_mw",
      "ipf", "workers"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (std::find(std::begin(kKnown), std::end(kKnown), it.key()) ==
        std::end(kKnown)) {
      throw ConfigError(it.key(), "unknown field");
    }
  }

  ExperimentConfig c;
  read_into(root, "name", c.name);
  if (root.contains("generator")) {
    parse_generator(root.at("generator"), base_dir, c.generator);
  }
  if (root.contains("synthesizer")) {
    try {
      c.method = parse_method(get<std::string>(root, "synthesizer", ""));
    } catch (const ArgumentError& e) {
      throw ConfigError("synthesizer", e.what());
    }
  }
  read_into(root, "epsilons", c.epsilons);
  read_into(root, "original_sizes", c.original_sizes);
  read_into(root, "synthetic_sizes", c.synthetic_sizes);
  read_into(root, "repetitions", c.repetitions);
  read_into(root, "alpha", c.alpha);
  if (root.contains("test")) {
    try {
      c.test = parse_test_kind(get<std::string>(root, "test", ""));
    } catch (const ArgumentError& e) {
      throw ConfigError("test", e.what());
    }
  }
  if (root.contains("variable")) {
    c.variable = get<std::string>(root, "variable", "");
  } else if (c.generator.kind == GeneratorSpec::Kind::kCsv &&
             c.generator.csv_data && !c.generator.csv_data->column_names().empty()) {
    c.variable = c.generator.csv_data->column_names().front();
  } else if (c.generator.kind == GeneratorSpec::Kind::kCopula) {
    c.variable = c.generator.copula->variables.front().name;
  }
  read_into(root, "seed", c.seed);
  read_into(root, "min_feasible", c.min_feasible);
  if (root.contains("binning")) c.binning = parse_binning_field(root, "binning", "");
  if (root.contains("test_binning")) {
    c.test_binning = parse_binning_field(root, "test_binning", "");
  }
  if (root.contains("mwem")) {
    const auto& m = root.at("mwem");
    if (!m.is_object()) throw ConfigError("mwem", "must be an object");
    read_into(m, "iterations", c.mwem_iterations, "mwem");
    read_into(m, "update_passes", c.mwem_update_passes, "mwem");
  }
  if (root.contains("perturbed")) {
    const auto& p = root.at("perturbed");
    if (!p.is_object()) throw ConfigError("perturbed", "must be an object");
    read_into(p, "normalize_to_original", c.perturbed_normalized, "perturbed");
  }
  if (root.contains("dp_mw")) {
    const auto& d = root.at("dp_mw");
    if (!d.is_object()) throw ConfigError("dp_mw", "must be an object");
    read_into(d, "delta", c.dp_delta, "dp_mw");
    read_into(d, "size_fraction", c.dp_size_fraction, "dp_mw");
    read_into(d, "null_samples", c.dp_null_samples, "dp_mw");
  }
  if (root.contains("ipf")) {
    const auto& f = root.at("ipf");
    if (!f.is_object()) throw ConfigError("ipf", "must be an object");
    read_into(f, "max_sweeps", c.ipf.max_sweeps, "ipf");
    read_into(f, "tolerance", c.ipf.tolerance, "ipf");
    read_into(f, "stagnation", c.ipf.stagnation, "ipf");
  }
  read_into(root, "workers", c.workers);
  // The non-private baseline has no epsilon axis.
  if (c.method == Method::kNone) c.epsilons = {0.0};
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError("", e.what());
  }
  return from_json(text, std::filesystem::path(path).parent_path().string());
}

bool ExperimentConfig::multivariate() const {
  return generator.kind == GeneratorSpec::Kind::kCopula;
}

DiscreteSchema ExperimentConfig::schema() const {
  if (multivariate()) return generator.copula->schema();
  return DiscreteSchema{{variable}, {binning}};
}

BinningSpec ExperimentConfig::variable_binning() const {
  if (multivariate()) {
    for (const auto& v : generator.copula->variables) {
      if (v.name == variable) return v.binning;
    }
  }
  return binning;
}

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw ConfigError("repetitions", "must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha", "must be in (0, 1)");
  if (original_sizes.empty()) throw ConfigError("original_sizes", "must be non-empty");
  if (epsilons.empty()) throw ConfigError("epsilons", "must be non-empty");
  if (method != Method::kNone) {
    for (double e : epsilons) {
      if (!(e > 0) || !std::isfinite(e)) {
        throw ConfigError("epsilons", "every epsilon must be positive and finite");
      }
    }
  }
  if (workers < 1) throw ConfigError("workers", "must be at least 1");

  // Size semantics: only the smoothed histogram draws a synthetic dataset of
  // chosen size m from a fixed-size original; every other method emits data
  // the size of its input.
  if (method == Method::kSmoothed) {
    if (synthetic_sizes.empty()) {
      throw ConfigError("synthetic_sizes",
                        "the smoothed histogram needs synthetic sizes m: it draws m "
                        "records from a private distribution fit to original data "
                        "of each size in original_sizes");
    }
    for (auto m : synthetic_sizes) {
      if (m < 2) throw ConfigError("synthetic_sizes", "every size must be at least 2");
    }
  } else if (!synthetic_sizes.empty()) {
    throw ConfigError("synthetic_sizes",
                      std::string("method '") + std::string(to_string(method)) +
                          "' produces data the size of the original; sweep "
                          "original_sizes instead (synthetic sizes apply to the "
                          "smoothed histogram only)");
  }

  for (auto n : original_sizes) {
    if (n < 2) throw ConfigError("original_sizes", "every size must be at least 2");
    if (generator.kind != GeneratorSpec::Kind::kCsv && n % 2 != 0) {
      throw ConfigError("original_sizes",
                        "simulated data splits evenly into two groups; sizes must be even");
    }
    if (generator.kind == GeneratorSpec::Kind::kCsv && generator.csv_data &&
        n > generator.csv_data->size()) {
      throw ConfigError("original_sizes",
                        "size " + std::to_string(n) + " exceeds the " +
                            std::to_string(generator.csv_data->size()) +
                            " records of the CSV source");
    }
  }

  if (generator.kind == GeneratorSpec::Kind::kCopula) {
    if (!generator.copula) throw ConfigError("generator.spec", "missing");
    const auto& vars = generator.copula->variables;
    if (std::none_of(vars.begin(), vars.end(),
                     [&](const auto& v) { return v.name == variable; })) {
      throw ConfigError("variable", "'" + variable + "' is not a copula variable");
    }
  } else if (generator.kind == GeneratorSpec::Kind::kCsv) {
    if (!generator.csv_data) throw ConfigError("generator.path", "no data loaded");
    const auto& names = generator.csv_data->column_names();
    if (std::find(names.begin(), names.end(), variable) == names.end()) {
      throw ConfigError("variable", "'" + variable + "' is not a CSV column");
    }
  } else if (variable != "value") {
    throw ConfigError("variable", "the Gaussian generator has a single column 'value'");
  }

  if (method == Method::kDpMannWhitney) {
    if (test != TestKind::kMannWhitneyU) {
      throw ConfigError("test", "dp_mw_baseline is a Mann-Whitney test; set test to mw_u");
    }
    DpMannWhitneyConfig dp;
    dp.budget = {1.0, dp_delta};
    dp.size_fraction = dp_size_fraction;
    dp.null_samples = dp_null_samples;
    try {
      dp.validate();
    } catch (const ConfigError& e) {
      throw ConfigError("dp_mw." + e.field(), e.what());
    }
  }
  if (method == Method::kMwem) {
    if (mwem_iterations < 1) throw ConfigError("mwem.iterations", "must be at least 1");
    std::size_t queries = 0;
    if (multivariate()) {
      const auto domain = schema().domain();
      for (const auto& m : one_and_two_way_marginals(domain.attribute_count())) {
        std::size_t cells = 1;
        for (auto a : m.attributes) cells *= domain.size(a);
        queries += cells;
      }
    } else {
      queries = 2 * binning.bin_count();
    }
    if (mwem_iterations > queries) {
      throw ConfigError("mwem.iterations",
                        "exceeds the " + std::to_string(queries) +
                            " queries of the workload");
    }
  }
  if (method == Method::kMarginalIpf) {
    if (ipf.max_sweeps < 1) throw ConfigError("ipf.max_sweeps", "must be at least 1");
    if (!(ipf.tolerance > 0)) throw ConfigError("ipf.tolerance", "must be positive");
  }
}

std::string ExperimentConfig::to_json() const {
  ordered_json g;
  switch (generator.kind) {
    case GeneratorSpec::Kind::kGaussian:
      g["kind"] = "gaussian";
      g["mode"] = std::string(to_string(generator.mode));
      break;
    case GeneratorSpec::Kind::kCopula:
      g["kind"] = "copula";
      g["mode"] = std::string(to_string(generator.mode));
      if (!generator.copula_path.empty()) g["spec"] = generator.copula_path;
      break;
    case GeneratorSpec::Kind::kCsv:
      g["kind"] = "csv";
      g["path"] = generator.csv_path;
      g["format"] = generator.csv_format;
      g["truth"] = generator.csv_null_truth ? "null" : "signal";
      break;
  }
  ordered_json root;
  root["name"] = name;
  root["generator"] = g;
  root["synthesizer"] = std::string(to_string(method));
  root["epsilons"] = epsilons;
  root["original_sizes"] = original_sizes;
  root["synthetic_sizes"] = synthetic_sizes;
  root["repetitions"] = repetitions;
  root["alpha"] = alpha;
  root["test"] = std::string(to_string(test));
  root["variable"] = variable;
  root["seed"] = seed;
  root["min_feasible"] = min_feasible;
  root["binning"] = binning.describe();
  if (test_binning) root["test_binning"] = test_binning->describe();
  root["mwem"] = {{"iterations", mwem_iterations},
                  {"update_passes", mwem_update_passes}};
  root["perturbed"] = {{"normalize_to_original", perturbed_normalized}};
  root["dp_mw"] = {{"delta", dp_delta},
                   {"size_fraction", dp_size_fraction},
                   {"null_samples", dp_null_samples}};
  root["ipf"] = {{"max_sweeps", ipf.max_sweeps},
                 {"tolerance", ipf.tolerance},
                 {"stagnation", ipf.stagnation}};
  root["workers"] = workers;
  return root.dump(2);
}

// ---------------------------------------------------------------------------
// Grid and repetitions.

std::string CellSpec::key() const {
  return std::string(to_string(method)) + "|" + format_double(epsilon) + "|" +
         std::to_string(n_original) + "|" + std::to_string(n_synthetic);
}

std::vector<CellSpec> expand_grid(const ExperimentConfig& config) {
  std::vector<CellSpec> cells;
  const bool smoothed = config.method == Method::kSmoothed;
  for (double epsilon : config.epsilons) {
    for (auto n : config.original_sizes) {
      if (smoothed) {
        for (auto m : config.synthetic_sizes) {
          cells.push_back({config.method, epsilon, n, m});
        }
      } else {
        cells.push_back({config.method, epsilon, n, n});
      }
    }
  }
  return cells;
}

std::uint64_t cell_seed(const ExperimentConfig& config, const CellSpec& cell) {
  return derive_seed(config.seed, hash_string(cell.key()));
}

GroupedDataset original_data(const ExperimentConfig& config,
                             std::size_t n_original, std::size_t rep) {
  const std::uint64_t stream = derive_seed(
      config.seed, hash_string("data|" + std::to_string(n_original)));
  RandomSource rng(derive_seed(stream, rep));
  const auto& g = config.generator;
  switch (g.kind) {
    case GeneratorSpec::Kind::kGaussian:
      return gaussian_bivariate(n_original, g.mode, rng);
    case GeneratorSpec::Kind::kCopula:
      return copula_multivariate(*g.copula, n_original, g.mode, rng);
    case GeneratorSpec::Kind::kCsv: {
      const auto& source = *g.csv_data;
      // Without replacement: partial Fisher-Yates over row indices.
      std::vector<std::size_t> rows(source.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      for (std::size_t i = 0; i < n_original; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(rows.size() - i));
        std::swap(rows[i], rows[j]);
      }
      rows.resize(n_original);
      return source.select(rows);
    }
  }
  throw ArgumentError("original_data: unknown generator");
}

namespace {

// Column tested in `data`: the configured variable, or the single column of a
// histogram-based synthetic dataset.
std::size_t test_column(const ExperimentConfig& config, const GroupedDataset& data) {
  const auto& names = data.column_names();
  if (std::find(names.begin(), names.end(), config.variable) != names.end()) {
    return data.column_index(config.variable);
  }
  if (std::find(names.begin(), names.end(), "value") != names.end()) {
    return data.column_index("value");
  }
  return 0;
}

}  // namespace

TestOutcome run_test(const ExperimentConfig& config, const GroupedDataset& data) {
  const std::size_t column = test_column(config, data);
  const auto x = data.values_of(0, column);
  const auto y = data.values_of(1, column);
  if (x.empty() || y.empty()) return TestOutcome::infeasible(FailureReason::kSingleClass);
  switch (config.test) {
    case TestKind::kMannWhitneyU:
      return mann_whitney_u(x, y);
    case TestKind::kTTest:
      return t_test(x, y);
    case TestKind::kMedian:
      return median_test(x, y);
    case TestKind::kChiSquared: {
      const BinningSpec spec = config.test_binning.value_or(config.variable_binning());
      const auto table = group_by_category(discretize(x, spec), discretize(y, spec),
                                           spec.bin_count());
      if (!table) return TestOutcome::infeasible(FailureReason::kConstantValues);
      return chi_squared(*table);
    }
  }
  throw ArgumentError("run_test: unknown test");
}

namespace {

RepetitionOutcome evaluate(const ExperimentConfig& config, const CellSpec& cell,
                           const GroupedDataset& original, std::size_t rep) {
  RandomSource rng(derive_seed(cell_seed(config, cell), rep));
  const PrivacyBudget budget{cell.epsilon, 0.0};
  TestOutcome outcome;
  switch (cell.method) {
    case Method::kNone:
      outcome = run_test(config, original);
      break;
    case Method::kDpMannWhitney: {
      const std::size_t column = test_column(config, original);
      const auto x = original.values_of(0, column);
      const auto y = original.values_of(1, column);
      if (x.empty() || y.empty()) {
        outcome = TestOutcome::infeasible(FailureReason::kSingleClass);
        break;
      }
      DpMannWhitneyConfig dp;
      dp.budget = {cell.epsilon, config.dp_delta};
      dp.size_fraction = config.dp_size_fraction;
      dp.null_samples = config.dp_null_samples;
      outcome = dp_mann_whitney(x, y, dp, rng).outcome;
      break;
    }
    case Method::kPerturbed: {
      const auto hist = build_histogram(original, config.variable_binning(),
                                        config.variable);
      PerturbedOptions options;
      options.normalize_to_original = config.perturbed_normalized;
      outcome = run_test(config, perturbed_histogram(hist, budget, rng, options).data);
      break;
    }
    case Method::kSmoothed: {
      const auto hist = build_histogram(original, config.variable_binning(),
                                        config.variable);
      outcome = run_test(
          config, smoothed_histogram(hist, budget, cell.n_synthetic, rng).data);
      break;
    }
    case Method::kMwem: {
      MwemOptions options;
      options.iterations = config.mwem_iterations;
      options.update_passes = config.mwem_update_passes;
      if (config.multivariate()) {
        outcome = run_test(config, mwem(original, config.schema(), budget, rng,
                                        options).data);
      } else {
        const auto hist = build_histogram(original, config.binning, config.variable);
        outcome = run_test(config, mwem(hist, budget, rng, options).data);
      }
      break;
    }
    case Method::kMarginalIpf: {
      const auto schema = config.schema();
      const auto marginals = one_and_two_way_marginals(schema.columns.size() + 1);
      outcome = run_test(config, marginal_ipf(original, schema, budget, marginals,
                                              rng, config.ipf)
                                     .synthetic.data);
      break;
    }
  }
  RepetitionOutcome result;
  result.failure = outcome.failure;
  result.rejected = outcome.rejects(config.alpha);
  result.p_value = outcome.p_value.value_or(1.0);
  return result;
}

// Runs `tasks` jobs on up to `workers` threads. Job i must only write its own
// output slots, which makes the result independent of scheduling.
template <typename Job>
void parallel_for(std::size_t tasks, std::size_t workers, Job&& job) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(tasks, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < tasks; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = tasks;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

RepetitionOutcome run_repetition(const ExperimentConfig& config,
                                 const CellSpec& cell, std::size_t rep) {
  return evaluate(config, cell, original_data(config, cell.n_original, rep), rep);
}

ErrorRateReport aggregate(const ExperimentConfig& config, const CellSpec& cell,
                          std::span<const RepetitionOutcome> outcomes) {
  ErrorRateReport report;
  report.method = std::string(to_string(cell.method));
  report.test = std::string(to_string(config.test));
  report.variable = config.variable;
  report.epsilon = cell.epsilon;
  report.n_original = cell.n_original;
  report.n_synthetic = cell.n_synthetic;
  report.repetitions = outcomes.size();
  for (auto reason : kAllFailureReasons) report.failures[reason] = 0;
  for (const auto& o : outcomes) {
    if (o.failure == FailureReason::kNone) {
      ++report.feasible_count;
      if (o.rejected) ++report.rejections;
    } else {
      ++report.failures[o.failure];
    }
  }
  report.error_kind =
      config.generator.null_truth() ? ErrorKind::kType1 : ErrorKind::kType2;
  report.type1_context = report.error_kind == ErrorKind::kType2;
  if (report.feasible_count > 0) {
    const double rate = static_cast<double>(report.rejections) /
                        static_cast<double>(report.feasible_count);
    report.error_rate = report.error_kind == ErrorKind::kType1 ? rate : 1.0 - rate;
  }
  report.suppressed = report.feasible_count < config.min_feasible;
  return report;
}

ErrorRateReport run_cell(const ExperimentConfig& config, const CellSpec& cell,
                         std::size_t workers) {
  std::vector<RepetitionOutcome> outcomes(config.repetitions);
  parallel_for(config.repetitions, workers, [&](std::size_t rep) {
    outcomes[rep] = run_repetition(config, cell, rep);
  });
  return aggregate(config, cell, outcomes);
}

std::vector<ErrorRateReport> run_grid(const ExperimentConfig& config,
                                      std::size_t workers) {
  config.validate();
  const auto cells = expand_grid(config);
  const std::size_t reps = config.repetitions;
  // One job per (original size, repetition): the original dataset is generated
  // once and shared by every cell of that size.
  const auto& sizes = config.original_sizes;
  std::vector<std::vector<std::size_t>> cells_by_size(sizes.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto pos = std::find(sizes.begin(), sizes.end(), cells[c].n_original) -
                     sizes.begin();
    cells_by_size[static_cast<std::size_t>(pos)].push_back(c);
  }
  std::vector<RepetitionOutcome> outcomes(cells.size() * reps);
  parallel_for(sizes.size() * reps, workers, [&](std::size_t job) {
    const std::size_t s = job / reps;
    const std::size_t rep = job % reps;
    if (cells_by_size[s].empty()) return;
    const auto original = original_data(config, sizes[s], rep);
    for (auto c : cells_by_size[s]) {
      outcomes[c * reps + rep] = evaluate(config, cells[c], original, rep);
    }
  });
  std::vector<ErrorRateReport> reports;
  reports.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    reports.push_back(aggregate(
        config, cells[c], std::span(outcomes).subspan(c * reps, reps)));
  }
  return reports;
}

}  // namespace dpvalid
