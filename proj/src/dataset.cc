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

#include "dpvalid/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dpvalid/errors.h"
#include "dpvalid/text.h"

namespace dpvalid {

BinningSpec BinningSpec::from_edges(std::vector<double> edges) {
  if (edges.size() < 3) {
    throw ArgumentError("BinningSpec: need at least 2 bins (3 edges)");
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i])) {
      throw ArgumentError("BinningSpec: edges must be finite");
    }
    if (i > 0 && !(edges[i] > edges[i - 1])) {
      throw ArgumentError("BinningSpec: edges must be strictly increasing");
    }
  }
  return BinningSpec(std::move(edges));
}

BinningSpec BinningSpec::uniform(double lo, double hi, std::size_t bins) {
  if (bins < 2 || !(hi > lo)) {
    throw ArgumentError("BinningSpec::uniform: need bins >= 2 and hi > lo");
  }
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  return from_edges(std::move(edges));
}

BinningSpec BinningSpec::integer_centered(int first, int last) {
  if (last <= first) {
    throw ArgumentError("BinningSpec::integer_centered: need last > first");
  }
  std::vector<double> edges;
  for (int k = first; k <= last + 1; ++k) edges.push_back(k - 0.5);
  return from_edges(std::move(edges));
}

BinningSpec BinningSpec::gaussian_100() { return integer_centered(1, 100); }

BinningSpec BinningSpec::bmi_24() {
  // The first and last bins are open-ended; 17 and 41 only fix midpoints.
  std::vector<double> edges;
  for (int e = 17; e <= 41; ++e) edges.push_back(e);
  return from_edges(std::move(edges));
}

BinningSpec BinningSpec::psa_40() {
  std::vector<double> edges;
  for (int e = 1; e <= 41; ++e) edges.push_back(e);
  return from_edges(std::move(edges));
}

BinningSpec BinningSpec::parse(std::string_view text) {
  const std::string t = trim(text);
  if (t == "gaussian100") return gaussian_100();
  if (t == "bmi24") return bmi_24();
  if (t == "psa40") return psa_40();
  const auto parts = split(t, ':');
  try {
    if (parts.size() == 4 && parts[0] == "uniform") {
      return uniform(parse_double(parts[1]), parse_double(parts[2]),
                     static_cast<std::size_t>(parse_int(parts[3])));
    }
    if (parts.size() == 3 && parts[0] == "integer") {
      return integer_centered(static_cast<int>(parse_int(parts[1])),
                              static_cast<int>(parse_int(parts[2])));
    }
    if (parts.size() == 2 && parts[0] == "edges") {
      std::vector<double> edges;
      for (const auto& e : split(parts[1], ',')) edges.push_back(parse_double(e));
      return from_edges(std::move(edges));
    }
  } catch (const std::invalid_argument& e) {
    throw ArgumentError("invalid binning '" + t + "': " + e.what());
  }
  throw ArgumentError("unknown binning '" + t + "'");
}

std::size_t BinningSpec::bin_of(double value) const {
  if (std::isnan(value)) throw ArgumentError("discretize: NaN value");
  auto it = std::upper_bound(edges_.begin(), edges_.end(), value);
  if (it == edges_.begin()) return 0;
  const auto bin = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return std::min(bin, bin_count() - 1);
}

double BinningSpec::midpoint(std::size_t bin) const {
  if (bin >= bin_count()) throw ArgumentError("midpoint: bin out of range");
  return 0.5 * (edges_[bin] + edges_[bin + 1]);
}

std::string BinningSpec::describe() const {
  if (*this == gaussian_100()) return "gaussian100";
  if (*this == bmi_24()) return "bmi24";
  if (*this == psa_40()) return "psa40";
  std::string out = "edges:";
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(edges_[i]);
  }
  return out;
}

GroupedDataset::GroupedDataset(std::vector<std::string> column_names)
    : names_(std::move(column_names)), columns_(names_.size()) {
  if (names_.empty()) throw ArgumentError("GroupedDataset: no columns");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty() || names_[i] == "group") {
      throw ArgumentError("GroupedDataset: invalid column name '" + names_[i] +
                          "'");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) {
        throw ArgumentError("GroupedDataset: duplicate column '" + names_[i] +
                            "'");
      }
    }
  }
}

GroupedDataset GroupedDataset::from_groups(std::span<const double> group0,
                                           std::span<const double> group1) {
  GroupedDataset data;
  data.reserve(group0.size() + group1.size());
  for (double v : group0) data.add(0, v);
  for (double v : group1) data.add(1, v);
  return data;
}

void GroupedDataset::add(int group, std::span<const double> row) {
  if (group != 0 && group != 1) {
    throw ArgumentError("GroupedDataset: group label must be 0 or 1");
  }
  if (row.size() != names_.size()) {
    throw ArgumentError("GroupedDataset: row width does not match columns");
  }
  for (double v : row) {
    if (!std::isfinite(v)) {
      throw ArgumentError("GroupedDataset: values must be finite");
    }
  }
  groups_.push_back(group);
  for (std::size_t c = 0; c < row.size(); ++c) columns_[c].push_back(row[c]);
}

void GroupedDataset::reserve(std::size_t n) {
  groups_.reserve(n);
  for (auto& c : columns_) c.reserve(n);
}

std::size_t GroupedDataset::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw ArgumentError("GroupedDataset: no column named '" + std::string(name) +
                      "'");
}

std::array<std::size_t, 2> GroupedDataset::group_sizes() const {
  std::array<std::size_t, 2> sizes{0, 0};
  for (int g : groups_) ++sizes[static_cast<std::size_t>(g)];
  return sizes;
}

std::vector<double> GroupedDataset::values_of(int group,
                                              std::size_t column) const {
  std::vector<double> out;
  const auto& values = columns_.at(column);
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i] == group) out.push_back(values[i]);
  }
  return out;
}

GroupedDataset GroupedDataset::select(std::span<const std::size_t> rows) const {
  GroupedDataset out(names_);
  out.reserve(rows.size());
  std::vector<double> row(names_.size());
  for (std::size_t r : rows) {
    if (r >= size()) throw ArgumentError("GroupedDataset::select: row out of range");
    for (std::size_t c = 0; c < names_.size(); ++c) row[c] = columns_[c][r];
    out.add(groups_[r], row);
  }
  return out;
}

std::vector<std::size_t> discretize(std::span<const double> values,
                                    const BinningSpec& spec) {
  std::vector<std::size_t> bins;
  bins.reserve(values.size());
  for (double v : values) bins.push_back(spec.bin_of(v));
  return bins;
}

GroupedHistogram build_histogram(const GroupedDataset& data,
                                 const BinningSpec& spec,
                                 std::string_view column) {
  if (data.empty()) throw ArgumentError("build_histogram: empty dataset");
  GroupedHistogram hist{spec, std::vector<std::int64_t>(2 * spec.bin_count(), 0),
                        static_cast<std::int64_t>(data.size())};
  const auto values = data.column(column);
  const auto groups = data.groups();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto g = static_cast<std::size_t>(groups[i]);
    ++hist.counts[g * spec.bin_count() + spec.bin_of(values[i])];
  }
  return hist;
}

GroupedDataset samples_from_counts(std::span<const std::int64_t> counts,
                                   const BinningSpec& spec) {
  const std::size_t bins = spec.bin_count();
  if (counts.size() != 2 * bins) {
    throw ArgumentError("samples_from_counts: expected 2 x bin_count counts");
  }
  std::int64_t total = 0;
  for (auto c : counts) {
    if (c < 0) throw ArgumentError("samples_from_counts: negative count");
    total += c;
  }
  GroupedDataset data;
  data.reserve(static_cast<std::size_t>(total));
  for (int g = 0; g < 2; ++g) {
    for (std::size_t i = 0; i < bins; ++i) {
      const double mid = spec.midpoint(i);
      for (std::int64_t k = 0; k < counts[static_cast<std::size_t>(g) * bins + i]; ++k) {
        data.add(g, mid);
      }
    }
  }
  return data;
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

char detect_delimiter(const std::string& header) {
  const auto semis = std::count(header.begin(), header.end(), ';');
  const auto commas = std::count(header.begin(), header.end(), ',');
  return semis > commas ? ';' : ',';
}

std::string rows_summary(const std::vector<std::size_t>& rows) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(rows.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(rows[i]);
  }
  if (rows.size() > shown) out += ", ... (" + std::to_string(rows.size()) + " total)";
  return out;
}

}  // namespace

GroupedDataset parse_cardio_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw IngestionError("cardio csv: empty input");
  strip_line_ending(header);
  const char delim = detect_delimiter(header);
  auto names = split(header, delim);
  for (auto& n : names) n = unquote(trim(n));
  auto find = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    throw IngestionError("cardio csv: missing column '" + std::string(name) + "'");
  };
  const std::size_t height_col = find("height");
  const std::size_t weight_col = find("weight");
  const std::size_t cardio_col = find("cardio");

  GroupedDataset data;
  std::vector<std::size_t> bad_rows;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    strip_line_ending(line);
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split(line, delim);
    try {
      if (cells.size() != names.size()) throw std::invalid_argument("width");
      const double height = parse_double(unquote(trim(cells[height_col])));
      const double weight = parse_double(unquote(trim(cells[weight_col])));
      const double label = parse_double(unquote(trim(cells[cardio_col])));
      if (!(height > 0) || !(weight > 0) || (label != 0.0 && label != 1.0)) {
        throw std::invalid_argument("range");
      }
      const double meters = height / 100.0;
      data.add(static_cast<int>(label), weight / (meters * meters));
    } catch (const std::invalid_argument&) {
      bad_rows.push_back(row);
    }
  }
  if (!bad_rows.empty()) {
    throw IngestionError("cardio csv: malformed data rows " + rows_summary(bad_rows),
                         bad_rows);
  }
  if (data.empty()) throw IngestionError("cardio csv: no data rows");
  return data;
}

GroupedDataset load_cardio_csv(const std::string& path) {
  auto in = open_input(path);
  return parse_cardio_csv(in);
}

GroupedDataset parse_grouped_csv(std::istream& in) {
  std::string first;
  if (!std::getline(in, first)) throw IngestionError("grouped csv: empty input");
  strip_line_ending(first);
  const char delim = detect_delimiter(first);
  auto head = split(first, delim);
  for (auto& h : head) h = unquote(trim(h));
  if (head.size() < 2) {
    throw IngestionError("grouped csv: need at least a group and a value column");
  }
  bool has_header = false;
  try {
    for (const auto& h : head) parse_double(h);
  } catch (const std::invalid_argument&) {
    has_header = true;
  }
  std::vector<std::string> columns;
  if (has_header) {
    if (head[0] != "group") {
      throw IngestionError("grouped csv: first column must be 'group'");
    }
    columns.assign(head.begin() + 1, head.end());
  } else {
    columns.push_back("value");
    for (std::size_t i = 2; i < head.size(); ++i) {
      columns.push_back("x" + std::to_string(i - 1));
    }
  }
  GroupedDataset data(columns);
  std::vector<std::size_t> bad_rows;
  std::vector<double> row_values(columns.size());
  std::size_t row = 0;
  auto ingest = [&](const std::string& line) {
    ++row;
    const auto cells = split(line, delim);
    try {
      if (cells.size() != columns.size() + 1) throw std::invalid_argument("width");
      const double g = parse_double(unquote(trim(cells[0])));
      if (g != 0.0 && g != 1.0) throw std::invalid_argument("group");
      for (std::size_t c = 0; c < columns.size(); ++c) {
        row_values[c] = parse_double(unquote(trim(cells[c + 1])));
      }
      data.add(static_cast<int>(g), row_values);
    } catch (const std::invalid_argument&) {
      bad_rows.push_back(row);
    }
  };
  if (!has_header) ingest(first);
  std::string line;
  while (std::getline(in, line)) {
    strip_line_ending(line);
    if (trim(line).empty()) continue;
    ingest(line);
  }
  if (!bad_rows.empty()) {
    throw IngestionError("grouped csv: malformed data rows " + rows_summary(bad_rows),
                         bad_rows);
  }
  return data;
}

GroupedDataset read_grouped_csv(const std::string& path) {
  auto in = open_input(path);
  return parse_grouped_csv(in);
}

void write_grouped_csv(const GroupedDataset& data, std::ostream& out) {
  out << "group";
  for (const auto& name : data.column_names()) out << ',' << name;
  out << '\n';
  const auto groups = data.groups();
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << groups[i];
    for (std::size_t c = 0; c < data.column_names().size(); ++c) {
      out << ',' << format_double(data.column(c)[i]);
    }
    out << '\n';
  }
}

void write_grouped_csv(const GroupedDataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_grouped_csv(data, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace dpvalid
