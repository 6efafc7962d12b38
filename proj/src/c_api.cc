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

#include "dpvalid/dpvalid.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "dpvalid/dataset.h"
#include "dpvalid/dp_mann_whitney.h"
#include "dpvalid/errors.h"
#include "dpvalid/harness.h"
#include "dpvalid/report.h"
#include "dpvalid/stattests.h"
#include "dpvalid/synth.h"
#include "dpvalid/text.h"
#include "json.hpp"

struct dpv_dataset {
  dpvalid::GroupedDataset data;
};

struct dpv_experiment {
  dpvalid::ExperimentConfig config;
};

struct dpv_reports {
  dpvalid::ReportBundle bundle;
};

namespace {

thread_local std::string last_error;

dpv_status fail(dpv_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
dpv_status guarded(Body&& body) {
  last_error.clear();
  try {
    body();
    return DPV_OK;
  } catch (const dpvalid::ConfigError& e) {
    return fail(DPV_ERR_CONFIG, e.what());
  } catch (const dpvalid::IngestionError& e) {
    std::string message = e.what();
    if (!e.rows().empty()) {
      message += " (rows";
      const std::size_t shown = std::min<std::size_t>(e.rows().size(), 10);
      for (std::size_t i = 0; i < shown; ++i) message += " " + std::to_string(e.rows()[i]);
      if (shown < e.rows().size()) message += " ...";
      message += ")";
    }
    return fail(DPV_ERR_INGESTION, message);
  } catch (const dpvalid::IoError& e) {
    return fail(DPV_ERR_IO, e.what());
  } catch (const dpvalid::ArgumentError& e) {
    return fail(DPV_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DPV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DPV_ERR_INTERNAL, e.what());
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw dpvalid::ArgumentError(std::string(what) + " must not be NULL");
}

std::string default_column(const dpvalid::GroupedDataset& data, const char* column) {
  if (column != nullptr && *column != '\0') {
    data.column_index(column);  // throws on unknown names
    return column;
  }
  const auto& names = data.column_names();
  if (names.empty()) throw dpvalid::ArgumentError("dataset has no value columns");
  return std::find(names.begin(), names.end(), "value") != names.end() ? "value"
                                                                       : names.front();
}

// Copy of `data` with its single column renamed.
dpvalid::GroupedDataset renamed(const dpvalid::GroupedDataset& data,
                                const std::string& name) {
  dpvalid::GroupedDataset out({name});
  out.reserve(data.size());
  const auto groups = data.groups();
  const auto values = data.column(0);
  for (std::size_t i = 0; i < data.size(); ++i) out.add(groups[i], values[i]);
  return out;
}

void fill_result(const dpvalid::TestOutcome& outcome, dpv_test_result* out) {
  out->statistic = outcome.statistic;
  out->has_p_value = outcome.p_value.has_value() ? 1 : 0;
  out->p_value = outcome.p_value.value_or(std::numeric_limits<double>::quiet_NaN());
  out->feasible = outcome.feasible() ? 1 : 0;
  // to_string returns views of string literals, so data() is NUL-terminated.
  out->failure = dpvalid::to_string(outcome.failure).data();
}

std::string provenance_json(const dpvalid::Provenance& p,
                            const std::vector<std::string>& columns,
                            const std::vector<dpvalid::BinningSpec>& binnings) {
  nlohmann::ordered_json j;
  j["method"] = p.method;
  j["epsilon"] = p.epsilon;
  j["seed"] = p.seed;
  j["original_n"] = p.original_n;
  j["synthetic_n"] = p.synthetic_n;
  j["columns"] = columns;
  auto& bins = j["binnings"] = nlohmann::ordered_json::array();
  for (const auto& b : binnings) bins.push_back(b.describe());
  auto& charges = j["charges"] = nlohmann::ordered_json::array();
  double spent = 0.0;
  for (const auto& c : p.charges) {
    charges.push_back({{"mechanism", c.mechanism}, {"epsilon", c.epsilon}, {"delta", c.delta}});
    spent += c.epsilon;
  }
  j["epsilon_spent"] = spent;
  return j.dump(2) + "\n";
}

}  // namespace

extern "C" {

const char* dpv_version(void) { return "0.1.0"; }

const char* dpv_last_error(void) { return last_error.c_str(); }

void dpv_string_free(char* s) { std::free(s); }

dpv_status dpv_dataset_load_csv(const char* path, const char* format,
                                dpv_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const std::string fmt = format == nullptr ? "grouped" : format;
    auto handle = std::make_unique<dpv_dataset>();
    if (fmt == "grouped") {
      handle->data = dpvalid::read_grouped_csv(path);
    } else if (fmt == "cardio") {
      handle->data = dpvalid::load_cardio_csv(path);
    } else {
      throw dpvalid::ArgumentError("unknown CSV format '" + fmt +
                                   "' (expected grouped or cardio)");
    }
    *out = handle.release();
  });
}

dpv_status dpv_dataset_from_groups(const double* group0, size_t n0,
                                   const double* group1, size_t n1,
                                   dpv_dataset** out) {
  return guarded([&] {
    require(out, "out");
    if (n0 > 0) require(group0, "group0");
    if (n1 > 0) require(group1, "group1");
    auto handle = std::make_unique<dpv_dataset>();
    handle->data = dpvalid::GroupedDataset::from_groups(
        std::span<const double>(group0, n0), std::span<const double>(group1, n1));
    *out = handle.release();
  });
}

dpv_status dpv_dataset_write_csv(const dpv_dataset* data, const char* path) {
  return guarded([&] {
    require(data, "data");
    require(path, "path");
    dpvalid::write_grouped_csv(data->data, std::string(path));
  });
}

void dpv_dataset_free(dpv_dataset* data) { delete data; }

size_t dpv_dataset_size(const dpv_dataset* data) {
  return data == nullptr ? 0 : data->data.size();
}

size_t dpv_dataset_group_size(const dpv_dataset* data, int group) {
  if (data == nullptr || (group != 0 && group != 1)) return 0;
  return data->data.group_sizes()[static_cast<std::size_t>(group)];
}

size_t dpv_dataset_column_count(const dpv_dataset* data) {
  return data == nullptr ? 0 : data->data.column_names().size();
}

const char* dpv_dataset_column_name(const dpv_dataset* data, size_t index) {
  if (data == nullptr || index >= data->data.column_names().size()) return nullptr;
  return data->data.column_names()[index].c_str();
}

dpv_status dpv_dataset_values(const dpv_dataset* data, const char* column,
                              int group, double* values, size_t capacity,
                              size_t* count) {
  return guarded([&] {
    require(data, "data");
    if (group != 0 && group != 1) throw dpvalid::ArgumentError("group must be 0 or 1");
    const auto name = default_column(data->data, column);
    const auto v = data->data.values_of(group, data->data.column_index(name));
    if (count != nullptr) *count = v.size();
    if (capacity > 0) require(values, "values");
    std::copy_n(v.begin(), std::min(capacity, v.size()), values);
  });
}

void dpv_synth_params_init(dpv_synth_params* params) {
  if (params == nullptr) return;
  *params = dpv_synth_params{};
  params->method = "perturbed";
  params->epsilon = 1.0;
}

dpv_status dpv_synthesize(const dpv_dataset* data, const dpv_synth_params* params,
                          dpv_dataset** out, char** provenance) {
  return guarded([&] {
    require(data, "data");
    require(params, "params");
    require(out, "out");
    require(params->method, "params->method");
    const auto method = dpvalid::parse_synthesizer(params->method);

    std::vector<std::string> columns;
    if (params->columns != nullptr && *params->columns != '\0') {
      for (const auto& c : dpvalid::split(params->columns, ',')) {
        columns.push_back(dpvalid::trim(c));
        data->data.column_index(columns.back());
      }
    } else {
      columns.push_back(default_column(data->data, nullptr));
    }
    std::vector<dpvalid::BinningSpec> binnings;
    if (params->binnings != nullptr && *params->binnings != '\0') {
      for (const auto& b : dpvalid::split(params->binnings, ';')) {
        binnings.push_back(dpvalid::BinningSpec::parse(dpvalid::trim(b)));
      }
    } else {
      binnings.push_back(dpvalid::BinningSpec::gaussian_100());
    }
    if (binnings.size() == 1 && columns.size() > 1) binnings.resize(columns.size(), binnings[0]);
    if (binnings.size() != columns.size()) {
      throw dpvalid::ArgumentError("need one binning per column (" +
                                   std::to_string(columns.size()) + " columns, " +
                                   std::to_string(binnings.size()) + " binnings)");
    }

    const dpvalid::PrivacyBudget budget{params->epsilon, 0.0};
    dpvalid::RandomSource rng(params->seed);
    dpvalid::SyntheticDataset synthetic;
    const bool single = columns.size() == 1;
    auto histogram = [&] {
      if (!single) {
        throw dpvalid::ArgumentError(std::string(dpvalid::to_string(method)) +
                                     " synthesizes a single column");
      }
      return dpvalid::build_histogram(data->data, binnings[0], columns[0]);
    };
    switch (method) {
      case dpvalid::Synthesizer::kPerturbed: {
        dpvalid::PerturbedOptions options;
        options.normalize_to_original = params->normalize_counts != 0;
        synthetic = dpvalid::perturbed_histogram(histogram(), budget, rng, options);
        break;
      }
      case dpvalid::Synthesizer::kSmoothed:
        if (params->synthetic_size == 0) {
          throw dpvalid::ArgumentError("the smoothed histogram needs a synthetic size");
        }
        synthetic = dpvalid::smoothed_histogram(histogram(), budget,
                                                params->synthetic_size, rng);
        break;
      case dpvalid::Synthesizer::kMwem: {
        dpvalid::MwemOptions options;
        if (params->mwem_iterations > 0) options.iterations = params->mwem_iterations;
        if (single) {
          synthetic = dpvalid::mwem(histogram(), budget, rng, options);
        } else {
          synthetic = dpvalid::mwem(data->data, dpvalid::DiscreteSchema{columns, binnings},
                                    budget, rng, options);
        }
        break;
      }
      case dpvalid::Synthesizer::kMarginalIpf: {
        const dpvalid::DiscreteSchema schema{columns, binnings};
        const auto marginals = dpvalid::one_and_two_way_marginals(columns.size() + 1);
        synthetic = dpvalid::marginal_ipf(data->data, schema, budget, marginals, rng)
                        .synthetic;
        break;
      }
    }
    auto handle = std::make_unique<dpv_dataset>();
    handle->data = single && synthetic.data.column_names().size() == 1 &&
                           synthetic.data.column_names()[0] != columns[0]
                       ? renamed(synthetic.data, columns[0])
                       : std::move(synthetic.data);
    if (provenance != nullptr) {
      *provenance = copy_string(provenance_json(synthetic.provenance, columns, binnings));
    }
    *out = handle.release();
  });
}

dpv_status dpv_run_test(const dpv_dataset* data, const char* test,
                        const char* column, const char* categories,
                        dpv_test_result* out) {
  return guarded([&] {
    require(data, "data");
    require(test, "test");
    require(out, "out");
    dpvalid::ExperimentConfig config;
    config.test = dpvalid::parse_test_kind(test);
    config.variable = default_column(data->data, column);
    if (categories != nullptr && *categories != '\0') {
      config.test_binning = dpvalid::BinningSpec::parse(categories);
    }
    fill_result(dpvalid::run_test(config, data->data), out);
  });
}

void dpv_dp_test_params_init(dpv_dp_test_params* params) {
  if (params == nullptr) return;
  const dpvalid::DpMannWhitneyConfig defaults;
  params->epsilon = defaults.budget.epsilon;
  params->delta = defaults.budget.delta;
  params->size_fraction = defaults.size_fraction;
  params->null_samples = defaults.null_samples;
  params->seed = 0;
}

dpv_status dpv_dp_test(const dpv_dataset* data, const char* column,
                       const dpv_dp_test_params* params, dpv_test_result* out) {
  return guarded([&] {
    require(data, "data");
    require(params, "params");
    require(out, "out");
    dpvalid::DpMannWhitneyConfig config;
    config.budget = {params->epsilon, params->delta};
    config.size_fraction = params->size_fraction;
    config.null_samples = params->null_samples;
    const auto index = data->data.column_index(default_column(data->data, column));
    const auto x = data->data.values_of(0, index);
    const auto y = data->data.values_of(1, index);
    dpvalid::RandomSource rng(params->seed);
    fill_result(dpvalid::dp_mann_whitney(x, y, config, rng).outcome, out);
  });
}

dpv_status dpv_experiment_parse(const char* json, const char* base_dir,
                                dpv_experiment** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    auto handle = std::make_unique<dpv_experiment>();
    handle->config = dpvalid::ExperimentConfig::from_json(
        json, base_dir == nullptr ? std::string(".") : std::string(base_dir));
    *out = handle.release();
  });
}

dpv_status dpv_experiment_load(const char* path, dpv_experiment** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto handle = std::make_unique<dpv_experiment>();
    handle->config = dpvalid::ExperimentConfig::load(path);
    *out = handle.release();
  });
}

void dpv_experiment_free(dpv_experiment* experiment) { delete experiment; }

dpv_status dpv_experiment_config_json(const dpv_experiment* experiment, char** out) {
  return guarded([&] {
    require(experiment, "experiment");
    require(out, "out");
    *out = copy_string(experiment->config.to_json());
  });
}

size_t dpv_experiment_cell_count(const dpv_experiment* experiment) {
  return experiment == nullptr ? 0 : dpvalid::expand_grid(experiment->config).size();
}

dpv_status dpv_experiment_run(const dpv_experiment* experiment, size_t workers,
                              dpv_reports** out) {
  return guarded([&] {
    require(experiment, "experiment");
    require(out, "out");
    const auto& config = experiment->config;
    auto handle = std::make_unique<dpv_reports>();
    handle->bundle.reports =
        dpvalid::run_grid(config, workers == 0 ? config.workers : workers);
    handle->bundle.alpha = config.alpha;
    handle->bundle.name = config.name;
    handle->bundle.config_json = config.to_json();
    *out = handle.release();
  });
}

size_t dpv_reports_count(const dpv_reports* reports) {
  return reports == nullptr ? 0 : reports->bundle.reports.size();
}

dpv_status dpv_reports_get(const dpv_reports* reports, size_t index,
                           dpv_report_row* out) {
  return guarded([&] {
    require(reports, "reports");
    require(out, "out");
    if (index >= reports->bundle.reports.size()) {
      throw dpvalid::ArgumentError("report index out of range");
    }
    const auto& r = reports->bundle.reports[index];
    auto failures = [&](dpvalid::FailureReason reason) -> std::size_t {
      const auto it = r.failures.find(reason);
      return it == r.failures.end() ? 0 : it->second;
    };
    out->method = r.method.c_str();
    out->test = r.test.c_str();
    out->variable = r.variable.c_str();
    out->epsilon = r.epsilon;
    out->n_original = r.n_original;
    out->n_synthetic = r.n_synthetic;
    out->repetitions = r.repetitions;
    out->feasible_count = r.feasible_count;
    out->rejections = r.rejections;
    out->error_rate = r.error_rate.value_or(std::numeric_limits<double>::quiet_NaN());
    out->type2 = r.error_kind == dpvalid::ErrorKind::kType2 ? 1 : 0;
    out->suppressed = r.suppressed ? 1 : 0;
    out->type1_context = r.type1_context ? 1 : 0;
    out->fail_single_class = failures(dpvalid::FailureReason::kSingleClass);
    out->fail_constant_values = failures(dpvalid::FailureReason::kConstantValues);
    out->fail_low_expected_frequency =
        failures(dpvalid::FailureReason::kLowExpectedFrequency);
    out->fail_degenerate_median = failures(dpvalid::FailureReason::kDegenerateMedian);
  });
}

dpv_status dpv_reports_emit(const dpv_reports* reports, const char* out_dir,
                            unsigned formats) {
  return guarded([&] {
    require(reports, "reports");
    require(out_dir, "out_dir");
    const auto& b = reports->bundle;
    dpvalid::emit_report(b.reports, out_dir, b.name, b.alpha, b.config_json,
                         formats & DPV_REPORT_ALL);
  });
}

dpv_status dpv_reports_load_json(const char* path, dpv_reports** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw dpvalid::IoError(std::string("cannot open '") + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto handle = std::make_unique<dpv_reports>();
    handle->bundle = dpvalid::reports_from_json(buffer.str());
    *out = handle.release();
  });
}

void dpv_reports_free(dpv_reports* reports) { delete reports; }

}  // extern "C"
