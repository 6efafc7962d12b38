/* Copyright 2026 The dpvalid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DPVALID_DPVALID_H_
#define DPVALID_DPVALID_H_

/* C interface to libdpvalid.
 *
 * Every fallible call returns a dpv_status; on failure a description is
 * available from dpv_last_error() on the calling thread until its next call
 * into the library. Handles are opaque and owned by the caller, who releases
 * them with the matching *_free function. Strings returned through char**
 * are released with dpv_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DPV_EXPORT __declspec(dllexport)
#elif defined(DPV_BUILDING_LIBRARY)
#define DPV_EXPORT __attribute__((visibility("default")))
#else
#define DPV_EXPORT
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dpv_status {
  DPV_OK = 0,
  DPV_ERR_ARGUMENT = 1,  /* invalid argument or unknown name */
  DPV_ERR_CONFIG = 2,    /* configuration rejected; message names the field */
  DPV_ERR_INGESTION = 3, /* malformed input records */
  DPV_ERR_IO = 4,
  DPV_ERR_INTERNAL = 5,
} dpv_status;

typedef struct dpv_dataset dpv_dataset;
typedef struct dpv_experiment dpv_experiment;
typedef struct dpv_reports dpv_reports;

DPV_EXPORT const char* dpv_version(void);
DPV_EXPORT const char* dpv_last_error(void);
DPV_EXPORT void dpv_string_free(char* s);

/* ---- Datasets ---------------------------------------------------------- */

/* format: "grouped" (group,<columns...>) or "cardio" (BMI by cardio label). */
DPV_EXPORT dpv_status dpv_dataset_load_csv(const char* path, const char* format,
                                           dpv_dataset** out);
/* Two groups of a single column "value". */
DPV_EXPORT dpv_status dpv_dataset_from_groups(const double* group0, size_t n0,
                                              const double* group1, size_t n1,
                                              dpv_dataset** out);
DPV_EXPORT dpv_status dpv_dataset_write_csv(const dpv_dataset* data,
                                            const char* path);
DPV_EXPORT void dpv_dataset_free(dpv_dataset* data);

DPV_EXPORT size_t dpv_dataset_size(const dpv_dataset* data);
DPV_EXPORT size_t dpv_dataset_group_size(const dpv_dataset* data, int group);
DPV_EXPORT size_t dpv_dataset_column_count(const dpv_dataset* data);
/* NULL if out of range. Valid while the handle lives. */
DPV_EXPORT const char* dpv_dataset_column_name(const dpv_dataset* data,
                                               size_t index);
/* Copies up to `capacity` values of `column` in `group`; *count receives the
 * number available. */
DPV_EXPORT dpv_status dpv_dataset_values(const dpv_dataset* data,
                                         const char* column, int group,
                                         double* values, size_t capacity,
                                         size_t* count);

/* ---- Synthesis --------------------------------------------------------- */

typedef struct dpv_synth_params {
  const char* method;     /* perturbed | smoothed | mwem | marginal_ipf */
  double epsilon;
  uint64_t seed;
  /* Comma-separated columns to synthesize; NULL means "value" if present,
   * else the first column. */
  const char* columns;
  /* Semicolon-separated binnings, one per column (see BinningSpec syntax);
   * NULL means "gaussian100". */
  const char* binnings;
  size_t synthetic_size;  /* smoothed histogram only: records to draw */
  size_t mwem_iterations; /* 0 means the default (10) */
  int normalize_counts;   /* perturbed histogram: rescale to original size */
} dpv_synth_params;

DPV_EXPORT void dpv_synth_params_init(dpv_synth_params* params);

/* On success *out receives the synthetic dataset and, if provenance_json is
 * non-NULL, a JSON description of method, budget spend and sizes. */
DPV_EXPORT dpv_status dpv_synthesize(const dpv_dataset* data,
                                     const dpv_synth_params* params,
                                     dpv_dataset** out, char** provenance_json);

/* ---- Tests ------------------------------------------------------------- */

typedef struct dpv_test_result {
  double statistic;
  double p_value;    /* meaningful only if has_p_value */
  int has_p_value;
  int feasible;
  /* "none", "single-class", "constant-values", "low-expected-frequency" or
   * "degenerate-median"; static storage. */
  const char* failure;
} dpv_test_result;

/* test: mw_u | t | chi2 | median. `column` NULL selects as for synthesis.
 * `categories` (chi2 only) is a binning; NULL means gaussian100. */
DPV_EXPORT dpv_status dpv_run_test(const dpv_dataset* data, const char* test,
                                   const char* column, const char* categories,
                                   dpv_test_result* out);

typedef struct dpv_dp_test_params {
  double epsilon;
  double delta;
  double size_fraction;
  size_t null_samples;
  uint64_t seed;
} dpv_dp_test_params;

DPV_EXPORT void dpv_dp_test_params_init(dpv_dp_test_params* params);

/* Differentially private Mann-Whitney test on the sensitive data. */
DPV_EXPORT dpv_status dpv_dp_test(const dpv_dataset* data, const char* column,
                                  const dpv_dp_test_params* params,
                                  dpv_test_result* out);

/* ---- Experiments ------------------------------------------------------- */

/* Relative paths inside the config resolve against base_dir (may be NULL). */
DPV_EXPORT dpv_status dpv_experiment_parse(const char* json,
                                           const char* base_dir,
                                           dpv_experiment** out);
DPV_EXPORT dpv_status dpv_experiment_load(const char* path,
                                          dpv_experiment** out);
DPV_EXPORT void dpv_experiment_free(dpv_experiment* experiment);
/* Effective configuration, every default filled in. */
DPV_EXPORT dpv_status dpv_experiment_config_json(const dpv_experiment* experiment,
                                                 char** out);
DPV_EXPORT size_t dpv_experiment_cell_count(const dpv_experiment* experiment);
/* workers == 0 uses the configured worker count. */
DPV_EXPORT dpv_status dpv_experiment_run(const dpv_experiment* experiment,
                                         size_t workers, dpv_reports** out);

/* ---- Reports ----------------------------------------------------------- */

typedef struct dpv_report_row {
  const char* method; /* valid while the reports handle lives */
  const char* test;
  const char* variable;
  double epsilon;
  size_t n_original;
  size_t n_synthetic;
  size_t repetitions;
  size_t feasible_count;
  size_t rejections;
  double error_rate; /* NaN when no repetition was feasible */
  int type2;         /* 0: Type I report, 1: Type II report */
  int suppressed;
  int type1_context;
  size_t fail_single_class;
  size_t fail_constant_values;
  size_t fail_low_expected_frequency;
  size_t fail_degenerate_median;
} dpv_report_row;

#define DPV_REPORT_CSV 1u
#define DPV_REPORT_JSON 2u
#define DPV_REPORT_SVG 4u
#define DPV_REPORT_ALL 7u

DPV_EXPORT size_t dpv_reports_count(const dpv_reports* reports);
DPV_EXPORT dpv_status dpv_reports_get(const dpv_reports* reports, size_t index,
                                      dpv_report_row* out);
/* Writes reports.csv, reports.json and figure_<name>*.svg into out_dir. */
DPV_EXPORT dpv_status dpv_reports_emit(const dpv_reports* reports,
                                       const char* out_dir, unsigned formats);
/* Reads a reports.json written by dpv_reports_emit. */
DPV_EXPORT dpv_status dpv_reports_load_json(const char* path, dpv_reports** out);
DPV_EXPORT void dpv_reports_free(dpv_reports* reports);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DPVALID_DPVALID_H_ */
