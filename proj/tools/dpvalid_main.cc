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

// dpvalid-cli: synthesize, test and run error-rate experiments.
//
// Exit codes: 0 success, 1 usage error, 2 data or configuration error.
// Every file is written inside the output directory (--out-dir, else
// $DPVALID_OUTPUT_DIR, else ./dpvalid-out). Command-line flags take
// precedence over values in an experiment config file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpvalid/dpvalid.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

const char* const kMethods[] = {"perturbed", "smoothed", "mwem", "marginal_ipf"};
const char* const kTests[] = {"mw_u", "t", "chi2", "median"};

int report_error(dpv_status status) {
  std::cerr << "error: " << dpv_last_error() << "\n";
  return status == DPV_ERR_ARGUMENT ? kExitUsage : kExitData;
}

// Data-stage errors (bad values, empty groups) are data errors, not usage.
int report_data_error() {
  std::cerr << "error: " << dpv_last_error() << "\n";
  return kExitData;
}

bool known(const std::string& value, const char* const* begin, const char* const* end) {
  for (auto it = begin; it != end; ++it) {
    if (value == *it) return true;
  }
  return false;
}

std::uint64_t fresh_seed() {
  std::random_device device;
  const auto now = static_cast<std::uint64_t>(
      std::chrono::steady_clock::now().time_since_epoch().count());
  return (static_cast<std::uint64_t>(device()) << 32 ^ device()) ^ now;
}

std::string output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("DPVALID_OUTPUT_DIR"); env && *env) return env;
  return "dpvalid-out";
}

bool ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory '" << dir << "': "
              << ec.message() << "\n";
    return false;
  }
  return true;
}

void print_header(const std::string& command, std::uint64_t seed,
                  const nlohmann::ordered_json& effective) {
  std::cout << "# dpvalid " << dpv_version() << " " << command << "\n";
  std::cout << "# seed: " << seed << "\n";
  std::cout << "# effective config:\n";
  std::istringstream lines(effective.dump(2));
  for (std::string line; std::getline(lines, line);) std::cout << "#   " << line << "\n";
}

void print_result(const dpv_test_result& r, double alpha) {
  nlohmann::ordered_json j;
  j["statistic"] = r.statistic;
  j["p_value"] = r.has_p_value ? nlohmann::ordered_json(r.p_value)
                               : nlohmann::ordered_json(nullptr);
  j["feasible"] = r.feasible != 0;
  j["failure"] = r.failure;
  j["alpha"] = alpha;
  j["reject"] = r.feasible && r.has_p_value && r.p_value < alpha;
  std::cout << j.dump(2) << "\n";
}

struct DataOptions {
  std::string input;
  std::string format = "grouped";
};

void add_data_options(CLI::App* app, DataOptions& o) {
  app->add_option("-i,--input", o.input, "Input CSV (group,<columns...>)")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--format", o.format, "CSV layout: grouped or cardio")
      ->check(CLI::IsMember({"grouped", "cardio"}));
}

// ---- synth -----------------------------------------------------------------

struct SynthOptions {
  DataOptions data;
  std::string method;
  double epsilon = 1.0;
  std::size_t m = 0;
  std::string columns;
  std::string binnings = "gaussian100";
  std::size_t mwem_iterations = 0;
  bool normalize = false;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int run_synth(const SynthOptions& o, bool seed_given, const std::string& help) {
  if (!known(o.method, std::begin(kMethods), std::end(kMethods))) {
    std::cerr << "error: unknown method '" << o.method
              << "' (expected perturbed, smoothed, mwem or marginal_ipf)\n\n"
              << help;
    return kExitUsage;
  }
  if (o.method == "smoothed" && o.m == 0) {
    std::cerr << "error: --m is required for the smoothed histogram\n\n" << help;
    return kExitUsage;
  }
  if (!(o.epsilon > 0) || !std::isfinite(o.epsilon)) {
    std::cerr << "error: --epsilon must be positive and finite\n";
    return kExitUsage;
  }
  const std::uint64_t seed = seed_given ? o.seed : fresh_seed();
  const std::string dir = output_dir(o.out_dir);

  nlohmann::ordered_json effective;
  effective["input"] = o.data.input;
  effective["format"] = o.data.format;
  effective["method"] = o.method;
  effective["epsilon"] = o.epsilon;
  if (o.method == "smoothed") effective["m"] = o.m;
  effective["columns"] = o.columns.empty() ? "(default)" : o.columns;
  effective["binnings"] = o.binnings;
  if (o.method == "mwem") effective["mwem_iterations"] = o.mwem_iterations ? o.mwem_iterations : 10;
  if (o.method == "perturbed") effective["normalize"] = o.normalize;
  effective["out_dir"] = dir;
  print_header("synth", seed, effective);

  dpv_dataset* data = nullptr;
  if (dpv_dataset_load_csv(o.data.input.c_str(), o.data.format.c_str(), &data) != DPV_OK) {
    return report_data_error();
  }
  dpv_synth_params params;
  dpv_synth_params_init(&params);
  params.method = o.method.c_str();
  params.epsilon = o.epsilon;
  params.seed = seed;
  params.columns = o.columns.empty() ? nullptr : o.columns.c_str();
  params.binnings = o.binnings.c_str();
  params.synthetic_size = o.m;
  params.mwem_iterations = o.mwem_iterations;
  params.normalize_counts = o.normalize ? 1 : 0;
  dpv_dataset* synthetic = nullptr;
  char* provenance = nullptr;
  const dpv_status status = dpv_synthesize(data, &params, &synthetic, &provenance);
  dpv_dataset_free(data);
  if (status != DPV_OK) return report_data_error();

  int code = kExitOk;
  if (!ensure_dir(dir)) {
    code = kExitData;
  } else {
    const auto csv = (std::filesystem::path(dir) / "synthetic.csv").string();
    const auto prov = (std::filesystem::path(dir) / "provenance.json").string();
    if (dpv_dataset_write_csv(synthetic, csv.c_str()) != DPV_OK) {
      code = report_data_error();
    } else {
      std::ofstream out(prov, std::ios::binary | std::ios::trunc);
      out << provenance;
      if (!out.flush()) {
        std::cerr << "error: cannot write '" << prov << "'\n";
        code = kExitData;
      } else {
        std::cout << "wrote " << csv << " (" << dpv_dataset_size(synthetic)
                  << " rows)\nwrote " << prov << "\n";
      }
    }
  }
  dpv_string_free(provenance);
  dpv_dataset_free(synthetic);
  return code;
}

// ---- test / dp-test ---------------------------------------------------------

struct TestOptions {
  DataOptions data;
  std::string test = "mw_u";
  std::string column;
  std::string categories;
  double alpha = 0.05;
};

int run_test(const TestOptions& o) {
  if (!known(o.test, std::begin(kTests), std::end(kTests))) {
    std::cerr << "error: unknown test '" << o.test << "'\n";
    return kExitUsage;
  }
  nlohmann::ordered_json effective;
  effective["input"] = o.data.input;
  effective["format"] = o.data.format;
  effective["test"] = o.test;
  effective["column"] = o.column.empty() ? "(default)" : o.column;
  if (o.test == "chi2") effective["categories"] = o.categories.empty() ? "gaussian100" : o.categories;
  effective["alpha"] = o.alpha;
  print_header("test", 0, effective);

  dpv_dataset* data = nullptr;
  if (dpv_dataset_load_csv(o.data.input.c_str(), o.data.format.c_str(), &data) != DPV_OK) {
    return report_data_error();
  }
  dpv_test_result result{};
  const dpv_status status =
      dpv_run_test(data, o.test.c_str(), o.column.empty() ? nullptr : o.column.c_str(),
                   o.categories.empty() ? nullptr : o.categories.c_str(), &result);
  dpv_dataset_free(data);
  if (status != DPV_OK) return report_data_error();
  print_result(result, o.alpha);
  return kExitOk;
}

struct DpTestOptions {
  DataOptions data;
  std::string column;
  double epsilon = 1.0;
  double delta = 1e-6;
  double size_fraction = 0.65;
  std::size_t null_samples = 10000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

int run_dp_test(const DpTestOptions& o, bool seed_given) {
  const std::uint64_t seed = seed_given ? o.seed : fresh_seed();
  nlohmann::ordered_json effective;
  effective["input"] = o.data.input;
  effective["format"] = o.data.format;
  effective["column"] = o.column.empty() ? "(default)" : o.column;
  effective["epsilon"] = o.epsilon;
  effective["delta"] = o.delta;
  effective["size_fraction"] = o.size_fraction;
  effective["null_samples"] = o.null_samples;
  effective["alpha"] = o.alpha;
  print_header("dp-test", seed, effective);

  dpv_dataset* data = nullptr;
  if (dpv_dataset_load_csv(o.data.input.c_str(), o.data.format.c_str(), &data) != DPV_OK) {
    return report_data_error();
  }
  dpv_dp_test_params params;
  dpv_dp_test_params_init(&params);
  params.epsilon = o.epsilon;
  params.delta = o.delta;
  params.size_fraction = o.size_fraction;
  params.null_samples = o.null_samples;
  params.seed = seed;
  dpv_test_result result{};
  const dpv_status status = dpv_dp_test(
      data, o.column.empty() ? nullptr : o.column.c_str(), &params, &result);
  dpv_dataset_free(data);
  if (status != DPV_OK) return report_error(status == DPV_ERR_ARGUMENT ? DPV_ERR_CONFIG : status);
  print_result(result, o.alpha);
  return kExitOk;
}

// ---- experiment / report ------------------------------------------------------

struct ExperimentOptions {
  std::string config;
  std::string name;
  std::string method;
  std::string test;
  std::vector<double> epsilons;
  std::vector<std::size_t> original_sizes;
  std::vector<std::size_t> synthetic_sizes;
  std::size_t repetitions = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::string out_dir;
};

int emit(const dpv_reports* reports, const std::string& dir, unsigned formats) {
  if (!ensure_dir(dir)) return kExitData;
  if (dpv_reports_emit(reports, dir.c_str(), formats) != DPV_OK) return report_data_error();
  std::vector<std::string> written;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("reports.", 0) == 0 || name.rfind("figure_", 0) == 0) {
      written.push_back(entry.path().string());
    }
  }
  std::sort(written.begin(), written.end());
  for (const auto& path : written) std::cout << "wrote " << path << "\n";
  return kExitOk;
}

int run_experiment(const ExperimentOptions& o, const CLI::App& app) {
  std::ifstream in(o.config, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open config '" << o.config << "'\n";
    return kExitData;
  }
  nlohmann::ordered_json root;
  try {
    root = nlohmann::ordered_json::parse(in);
  } catch (const std::exception& e) {
    std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
    return kExitData;
  }
  if (!root.is_object()) {
    std::cerr << "error: config must be a JSON object\n";
    return kExitData;
  }
  // Flags override the file.
  if (app.count("--name")) root["name"] = o.name;
  if (app.count("--method")) root["synthesizer"] = o.method;
  if (app.count("--test")) root["test"] = o.test;
  if (app.count("--epsilons")) root["epsilons"] = o.epsilons;
  if (app.count("--original-sizes")) root["original_sizes"] = o.original_sizes;
  if (app.count("--synthetic-sizes")) root["synthetic_sizes"] = o.synthetic_sizes;
  if (app.count("--repetitions")) root["repetitions"] = o.repetitions;
  if (app.count("--workers")) root["workers"] = o.workers;
  if (app.count("--seed")) {
    root["seed"] = o.seed;
  } else if (!root.contains("seed")) {
    root["seed"] = fresh_seed();
  }
  const std::string base_dir = std::filesystem::path(o.config).parent_path().string();
  dpv_experiment* experiment = nullptr;
  if (dpv_experiment_parse(root.dump().c_str(), base_dir.empty() ? "." : base_dir.c_str(),
                           &experiment) != DPV_OK) {
    return report_data_error();
  }
  char* effective = nullptr;
  dpv_experiment_config_json(experiment, &effective);
  const auto parsed = nlohmann::ordered_json::parse(effective);
  dpv_string_free(effective);
  const std::string dir = output_dir(o.out_dir);
  print_header("experiment", parsed["seed"].get<std::uint64_t>(), parsed);
  std::cout << "# cells: " << dpv_experiment_cell_count(experiment)
            << ", output: " << dir << "\n";

  dpv_reports* reports = nullptr;
  const dpv_status status = dpv_experiment_run(experiment, 0, &reports);
  dpv_experiment_free(experiment);
  if (status != DPV_OK) return report_data_error();
  for (std::size_t i = 0; i < dpv_reports_count(reports); ++i) {
    dpv_report_row row;
    dpv_reports_get(reports, i, &row);
    std::printf("%-14s eps=%-6g n=%-6zu m=%-6zu feasible=%zu/%zu %s=%s%s\n", row.method,
                row.epsilon, row.n_original, row.n_synthetic, row.feasible_count,
                row.repetitions, row.type2 ? "type2" : "type1",
                std::isnan(row.error_rate) ? "n/a"
                                           : std::to_string(row.error_rate).c_str(),
                row.suppressed ? " (suppressed)" : "");
  }
  const int code = emit(reports, dir, DPV_REPORT_ALL);
  dpv_reports_free(reports);
  return code;
}

struct ReportOptions {
  std::string input;
  std::vector<std::string> formats{"csv", "svg"};
  std::string out_dir;
};

int run_report(const ReportOptions& o) {
  unsigned formats = 0;
  for (const auto& f : o.formats) {
    formats |= f == "csv" ? DPV_REPORT_CSV : f == "json" ? DPV_REPORT_JSON : DPV_REPORT_SVG;
  }
  dpv_reports* reports = nullptr;
  if (dpv_reports_load_json(o.input.c_str(), &reports) != DPV_OK) {
    return report_data_error();
  }
  const std::string dir = output_dir(o.out_dir);
  nlohmann::ordered_json effective;
  effective["input"] = o.input;
  effective["formats"] = o.formats;
  effective["out_dir"] = dir;
  print_header("report", 0, effective);
  const int code = emit(reports, dir, formats);
  dpv_reports_free(reports);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpvalid: validity of statistical tests on differentially private "
               "synthetic data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dpv_version()));
  app.footer(
      "Exit codes: 0 success, 1 usage error, 2 data or configuration error.\n"
      "Output directory: --out-dir, else $DPVALID_OUTPUT_DIR, else ./dpvalid-out.");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a DP synthetic dataset");
  add_data_options(synth_cmd, synth.data);
  synth_cmd->add_option("--method", synth.method,
                        "perturbed | smoothed | mwem | marginal_ipf")
      ->required();
  synth_cmd->add_option("-e,--epsilon", synth.epsilon, "Privacy budget epsilon")
      ->capture_default_str();
  synth_cmd->add_option("--m", synth.m, "Synthetic size (smoothed histogram)");
  synth_cmd->add_option("--columns", synth.columns,
                        "Comma-separated columns (default: value or first column)");
  synth_cmd->add_option("--binning", synth.binnings,
                        "Semicolon-separated binnings, one per column: gaussian100, "
                        "bmi24, psa40, uniform:LO:HI:N, integer:A:B, edges:E0,E1,...")
      ->capture_default_str();
  synth_cmd->add_option("--mwem-iterations", synth.mwem_iterations,
                        "MWEM iterations (default 10)");
  synth_cmd->add_flag("--normalize", synth.normalize,
                      "Perturbed histogram: rescale counts to the original size");
  synth_cmd->add_option("--seed", synth.seed, "Seed (random and printed if omitted)");
  synth_cmd->add_option("-o,--out-dir", synth.out_dir, "Output directory");

  TestOptions test;
  auto* test_cmd = app.add_subcommand("test", "Run a classical two-sample test");
  add_data_options(test_cmd, test.data);
  test_cmd->add_option("-t,--test", test.test, "mw_u | t | chi2 | median")
      ->capture_default_str();
  test_cmd->add_option("--column", test.column, "Column to test");
  test_cmd->add_option("--categories", test.categories,
                       "chi2: binning defining the categories (default gaussian100)");
  test_cmd->add_option("--alpha", test.alpha, "Significance level")->capture_default_str();

  DpTestOptions dp;
  auto* dp_cmd = app.add_subcommand("dp-test", "Differentially private Mann-Whitney test");
  add_data_options(dp_cmd, dp.data);
  dp_cmd->add_option("--column", dp.column, "Column to test");
  dp_cmd->add_option("-e,--epsilon", dp.epsilon, "Privacy budget epsilon")
      ->capture_default_str();
  dp_cmd->add_option("--delta", dp.delta, "Privacy parameter delta")->capture_default_str();
  dp_cmd->add_option("--size-fraction", dp.size_fraction,
                     "Share of epsilon spent on the group size")
      ->capture_default_str();
  dp_cmd->add_option("--null-samples", dp.null_samples, "Simulated null statistics")
      ->capture_default_str();
  dp_cmd->add_option("--alpha", dp.alpha, "Significance level")->capture_default_str();
  dp_cmd->add_option("--seed", dp.seed, "Seed (random and printed if omitted)");

  ExperimentOptions exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Run an error-rate experiment grid");
  exp_cmd->add_option("-c,--config", exp.config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  exp_cmd->add_option("--name", exp.name, "Override: experiment name");
  exp_cmd->add_option("--method", exp.method, "Override: synthesizer");
  exp_cmd->add_option("--test", exp.test, "Override: test");
  exp_cmd->add_option("--epsilons", exp.epsilons, "Override: epsilon grid")->delimiter(',');
  exp_cmd->add_option("--original-sizes", exp.original_sizes, "Override: original sizes")
      ->delimiter(',');
  exp_cmd->add_option("--synthetic-sizes", exp.synthetic_sizes,
                      "Override: synthetic sizes (smoothed histogram)")
      ->delimiter(',');
  exp_cmd->add_option("--repetitions", exp.repetitions, "Override: repetitions per cell");
  exp_cmd->add_option("--seed", exp.seed, "Override: master seed");
  exp_cmd->add_option("--workers", exp.workers, "Override: worker threads")
      ->check(CLI::PositiveNumber);
  exp_cmd->add_option("-o,--out-dir", exp.out_dir, "Output directory");

  ReportOptions rep;
  auto* rep_cmd = app.add_subcommand("report", "Re-render outputs from reports.json");
  rep_cmd->add_option("-i,--input", rep.input, "reports.json")
      ->required()
      ->check(CLI::ExistingFile);
  rep_cmd->add_option("--format", rep.formats, "csv, json and/or svg")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "json", "svg"}))
      ->capture_default_str();
  rep_cmd->add_option("-o,--out-dir", rep.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*synth_cmd) return run_synth(synth, synth_cmd->count("--seed") > 0, synth_cmd->help());
  if (*test_cmd) return run_test(test);
  if (*dp_cmd) return run_dp_test(dp, dp_cmd->count("--seed") > 0);
  if (*exp_cmd) return run_experiment(exp, *exp_cmd);
  if (*rep_cmd) return run_report(rep);
  return kExitUsage;
}
