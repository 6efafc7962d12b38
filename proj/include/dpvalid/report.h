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

#ifndef DPVALID_REPORT_H_
#define DPVALID_REPORT_H_

// Serialization of error-rate reports: reports.csv, reports.json and one SVG
// line chart per (method, test, variable, error kind).

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpvalid/harness.h"

namespace dpvalid {

enum ReportFormat : unsigned {
  kReportCsv = 1u << 0,
  kReportJson = 1u << 1,
  kReportSvg = 1u << 2,
  kReportAll = kReportCsv | kReportJson | kReportSvg,
};

void write_reports_csv(std::span<const ErrorRateReport> reports, std::ostream& out);

// {"config": <config_json or null>, "alpha": ..., "reports": [...]} with the
// per-reason failure breakdown of every cell.
std::string reports_to_json(std::span<const ErrorRateReport> reports,
                            double alpha, std::string_view config_json = {});

struct ReportBundle {
  std::vector<ErrorRateReport> reports;
  double alpha = 0.05;
  std::string name = "experiment";
  // Pretty-printed effective config, empty if absent.
  std::string config_json;
};

// Inverse of reports_to_json. Throws ConfigError on malformed input.
ReportBundle reports_from_json(std::string_view text);

// Error rate against epsilon (log scale), one series per size, dashed line at
// alpha. Suppressed or empty cells break the series.
std::string render_svg(std::span<const ErrorRateReport> reports, double alpha,
                       std::string_view title);

// Writes the selected formats into `out_dir` (created if needed) and returns
// the written paths. Throws IoError if a file cannot be written.
std::vector<std::string> emit_report(std::span<const ErrorRateReport> reports,
                                     const std::string& out_dir,
                                     std::string_view name, double alpha,
                                     std::string_view config_json = {},
                                     unsigned formats = kReportAll);

}  // namespace dpvalid

#endif  // DPVALID_REPORT_H_
