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

#include "dpvalid/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "dpvalid/errors.h"
#include "dpvalid/text.h"
#include "json.hpp"

namespace dpvalid {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string safe_name(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out.empty() ? "experiment" : out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out.flush()) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

void write_reports_csv(std::span<const ErrorRateReport> reports, std::ostream& out) {
  out << "method,test,variable,epsilon,n_original,n_synthetic,repetitions,"
         "feasible_count,rejections,error_rate,error_kind,suppressed,type1_context";
  for (auto reason : kAllFailureReasons) out << ",fail_" << to_string(reason);
  out << '\n';
  for (const auto& r : reports) {
    out << r.method << ',' << r.test << ',' << r.variable << ','
        << format_double(r.epsilon) << ',' << r.n_original << ','
        << r.n_synthetic << ',' << r.repetitions << ',' << r.feasible_count
        << ',' << r.rejections << ','
        << (r.error_rate ? format_double(*r.error_rate) : "") << ','
        << to_string(r.error_kind) << ',' << (r.suppressed ? "true" : "false")
        << ',' << (r.type1_context ? "true" : "false");
    for (auto reason : kAllFailureReasons) {
      const auto it = r.failures.find(reason);
      out << ',' << (it == r.failures.end() ? 0 : it->second);
    }
    out << '\n';
  }
}

std::string reports_to_json(std::span<const ErrorRateReport> reports,
                            double alpha, std::string_view config_json) {
  ordered_json root;
  root["config"] = config_json.empty() ? ordered_json(nullptr)
                                       : ordered_json::parse(config_json);
  root["alpha"] = alpha;
  auto& list = root["reports"] = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json item;
    item["method"] = r.method;
    item["test"] = r.test;
    item["variable"] = r.variable;
    item["epsilon"] = r.epsilon;
    item["n_original"] = r.n_original;
    item["n_synthetic"] = r.n_synthetic;
    item["repetitions"] = r.repetitions;
    item["feasible_count"] = r.feasible_count;
    item["rejections"] = r.rejections;
    item["error_rate"] = r.error_rate ? ordered_json(*r.error_rate) : ordered_json(nullptr);
    item["error_kind"] = std::string(to_string(r.error_kind));
    item["suppressed"] = r.suppressed;
    item["type1_context"] = r.type1_context;
    ordered_json failures = ordered_json::object();
    for (auto reason : kAllFailureReasons) {
      const auto it = r.failures.find(reason);
      failures[std::string(to_string(reason))] =
          it == r.failures.end() ? 0 : it->second;
    }
    item["failures"] = failures;
    list.push_back(item);
  }
  return root.dump(2) + "\n";
}

ReportBundle reports_from_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  ReportBundle bundle;
  try {
    if (!root.is_object() || !root.contains("reports")) {
      throw ConfigError("reports", "missing");
    }
    bundle.alpha = root.value("alpha", 0.05);
    if (root.contains("config") && root["config"].is_object()) {
      const auto& config = root["config"];
      bundle.config_json = ordered_json::parse(config.dump()).dump(2);
      bundle.name = config.value("name", bundle.name);
    }
    for (const auto& item : root.at("reports")) {
      ErrorRateReport r;
      r.method = item.at("method").get<std::string>();
      r.test = item.at("test").get<std::string>();
      r.variable = item.value("variable", std::string("value"));
      r.epsilon = item.at("epsilon").get<double>();
      r.n_original = item.at("n_original").get<std::size_t>();
      r.n_synthetic = item.at("n_synthetic").get<std::size_t>();
      r.repetitions = item.at("repetitions").get<std::size_t>();
      r.feasible_count = item.at("feasible_count").get<std::size_t>();
      r.rejections = item.at("rejections").get<std::size_t>();
      if (!item.at("error_rate").is_null()) r.error_rate = item["error_rate"].get<double>();
      const auto kind = item.at("error_kind").get<std::string>();
      if (kind != "type1" && kind != "type2") {
        throw ConfigError("reports.error_kind", "must be type1 or type2");
      }
      r.error_kind = kind == "type1" ? ErrorKind::kType1 : ErrorKind::kType2;
      r.suppressed = item.at("suppressed").get<bool>();
      r.type1_context = item.value("type1_context", false);
      for (auto reason : kAllFailureReasons) r.failures[reason] = 0;
      if (item.contains("failures")) {
        for (auto it = item["failures"].begin(); it != item["failures"].end(); ++it) {
          r.failures[parse_failure_reason(it.key())] = it.value().get<std::size_t>();
        }
      }
      bundle.reports.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ConfigError("reports", std::string("malformed report: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError("reports", e.what());
  }
  return bundle;
}

std::string render_svg(std::span<const ErrorRateReport> reports, double alpha,
                       std::string_view title) {
  constexpr double kWidth = 640, kHeight = 420;
  constexpr double kLeft = 64, kRight = 140, kTop = 40, kBottom = 56;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  std::vector<double> epsilons;
  for (const auto& r : reports) epsilons.push_back(r.epsilon);
  std::sort(epsilons.begin(), epsilons.end());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());
  // Log axis; a zero epsilon (non-private baseline) is drawn at the left edge.
  std::vector<double> positive;
  for (double e : epsilons) {
    if (e > 0) positive.push_back(e);
  }
  double lo = positive.empty() ? 1.0 : positive.front();
  double hi = positive.empty() ? 1.0 : positive.back();
  double log_lo = std::log10(lo), log_hi = std::log10(hi);
  if (log_hi - log_lo < 1e-9) {
    log_lo -= 0.5;
    log_hi += 0.5;
  }
  auto x_of = [&](double e) {
    if (!(e > 0)) return kLeft;
    return kLeft + plot_w * (std::log10(e) - log_lo) / (log_hi - log_lo);
  };
  auto y_of = [&](double rate) { return kTop + plot_h * (1.0 - rate); };

  // Series: synthetic size for the smoothed histogram, original size otherwise.
  std::map<std::size_t, std::vector<const ErrorRateReport*>> series;
  bool synthetic_axis = false;
  for (const auto& r : reports) {
    const bool smoothed = r.method == "smoothed";
    synthetic_axis = synthetic_axis || smoothed;
    series[smoothed ? r.n_synthetic : r.n_original].push_back(&r);
  }
  static const char* const kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                        "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fixed(kLeft + plot_w / 2, 1) << "\" y=\"22\" "
      << "text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
      << "</text>\n";
  // Axes and grid.
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double rate = i / 5.0;
    const double y = y_of(rate);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << fixed(y, 2) << "\" x2=\""
        << kLeft + plot_w << "\" y2=\"" << fixed(y, 2)
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(y + 4, 2)
        << "\" text-anchor=\"end\">" << fixed(rate, 1) << "</text>\n";
  }
  for (double e : epsilons) {
    const double x = x_of(e);
    svg << "<line x1=\"" << fixed(x, 2) << "\" y1=\"" << kTop + plot_h
        << "\" x2=\"" << fixed(x, 2) << "\" y2=\"" << kTop + plot_h + 5
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fixed(x, 2) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << format_double(e) << "</text>\n";
  }
  svg << "<text x=\"" << fixed(kLeft + plot_w / 2, 1) << "\" y=\""
      << kHeight - 14 << "\" text-anchor=\"middle\">epsilon (log scale)</text>\n";
  const std::string kind =
      !reports.empty() && reports.front().error_kind == ErrorKind::kType2
          ? "Type II error"
          : "Type I error";
  svg << "<text x=\"16\" y=\"" << fixed(kTop + plot_h / 2, 1)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fixed(kTop + plot_h / 2, 1) << ")\">" << kind << "</text>\n";
  // Significance level.
  svg << "<line class=\"alpha\" x1=\"" << kLeft << "\" y1=\"" << fixed(y_of(alpha), 2)
      << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << fixed(y_of(alpha), 2)
      << "\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n";

  std::size_t index = 0;
  for (auto& [size, points] : series) {
    const char* color = kColors[index % std::size(kColors)];
    std::sort(points.begin(), points.end(),
              [](const auto* a, const auto* b) { return a->epsilon < b->epsilon; });
    // Consecutive drawable points form one polyline; a suppressed cell ends it.
    std::vector<std::string> segment;
    auto flush = [&] {
      if (segment.size() >= 2) {
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < segment.size(); ++i) {
          svg << (i ? " " : "") << segment[i];
        }
        svg << "\"/>\n";
      }
      segment.clear();
    };
    for (const auto* p : points) {
      if (p->suppressed || !p->error_rate) {
        flush();
        continue;
      }
      const std::string xy = fixed(x_of(p->epsilon), 2) + "," +
                             fixed(y_of(*p->error_rate), 2);
      segment.push_back(xy);
      svg << "<circle cx=\"" << fixed(x_of(p->epsilon), 2) << "\" cy=\""
          << fixed(y_of(*p->error_rate), 2) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    flush();
    const double ly = kTop + 12 + 18.0 * static_cast<double>(index);
    const double lx = kLeft + plot_w + 16;
    svg << "<line x1=\"" << lx << "\" y1=\"" << fixed(ly, 1) << "\" x2=\""
        << lx + 20 << "\" y2=\"" << fixed(ly, 1) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << lx + 26 << "\" y=\"" << fixed(ly + 4, 1) << "\">"
        << (synthetic_axis ? "m = " : "n = ") << size << "</text>\n";
    ++index;
  }
  svg << "<text x=\"" << kLeft + plot_w + 16 << "\" y=\""
      << fixed(kTop + 12 + 18.0 * static_cast<double>(index), 1)
      << "\">- - alpha = " << format_double(alpha) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> emit_report(std::span<const ErrorRateReport> reports,
                                     const std::string& out_dir,
                                     std::string_view name, double alpha,
                                     std::string_view config_json,
                                     unsigned formats) {
  if (reports.empty()) throw ArgumentError("emit_report: no reports");
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());

  std::vector<std::string> written;
  if (formats & kReportCsv) {
    std::ostringstream csv;
    write_reports_csv(reports, csv);
    write_file(dir / "reports.csv", csv.str());
    written.push_back((dir / "reports.csv").string());
  }
  if (formats & kReportJson) {
    write_file(dir / "reports.json", reports_to_json(reports, alpha, config_json));
    written.push_back((dir / "reports.json").string());
  }
  if (formats & kReportSvg) {
    using Key = std::tuple<std::string, std::string, std::string, int>;
    std::map<Key, std::vector<ErrorRateReport>> figures;
    for (const auto& r : reports) {
      figures[{r.method, r.test, r.variable, static_cast<int>(r.error_kind)}]
          .push_back(r);
    }
    const std::string base = safe_name(name);
    for (const auto& [key, group] : figures) {
      const auto& [method, test, variable, kind] = key;
      const std::string suffix =
          figures.size() == 1
              ? ""
              : "_" + safe_name(method + "_" + test + "_" + variable + "_" +
                                std::string(to_string(static_cast<ErrorKind>(kind))));
      const auto path = dir / ("figure_" + base + suffix + ".svg");
      const std::string title = method + " / " + test + " on " + variable;
      write_file(path, render_svg(group, alpha, title));
      written.push_back(path.string());
    }
  }
  return written;
}

}  // namespace dpvalid
