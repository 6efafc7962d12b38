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

#ifndef DPVALID_DATASET_H_
#define DPVALID_DATASET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dpvalid {

// Partition of the real line into bin_count() bins. Bin i covers
// [edges[i], edges[i+1]); values outside the edge range clamp to the first or
// last bin, so every real number has exactly one bin.
class BinningSpec {
 public:
  static BinningSpec from_edges(std::vector<double> edges);
  // `bins` equal-width bins over [lo, hi).
  static BinningSpec uniform(double lo, double hi, std::size_t bins);
  // Bin k covers [k - 0.5, k + 0.5) for k = first..last.
  static BinningSpec integer_centered(int first, int last);

  // Gaussian simulation: 100 integer-centered bins labeled 1..100.
  static BinningSpec gaussian_100();
  // BMI: {<18, [18,19), ..., [39,40), >=40}.
  static BinningSpec bmi_24();
  // PSA: {[1,2), ..., [39,40), >=40}, values below 1 in the first bin.
  static BinningSpec psa_40();

  // Accepts "gaussian100", "bmi24", "psa40", "uniform:LO:HI:BINS",
  // "integer:FIRST:LAST" or "edges:E0,E1,...".
  static BinningSpec parse(std::string_view text);

  std::size_t bin_count() const { return edges_.size() - 1; }
  std::span<const double> edges() const { return edges_; }
  std::size_t bin_of(double value) const;
  double midpoint(std::size_t bin) const;

  // Canonical textual form accepted by parse().
  std::string describe() const;

  friend bool operator==(const BinningSpec&, const BinningSpec&) = default;

 private:
  explicit BinningSpec(std::vector<double> edges) : edges_(std::move(edges)) {}

  std::vector<double> edges_;
};

// Records of (group label in {0,1}, one or more named real columns). The
// bivariate case has a single column named "value".
class GroupedDataset {
 public:
  GroupedDataset() : GroupedDataset(std::vector<std::string>{"value"}) {}
  explicit GroupedDataset(std::vector<std::string> column_names);

  // Bivariate convenience constructor.
  static GroupedDataset from_groups(std::span<const double> group0,
                                    std::span<const double> group1);

  void add(int group, std::span<const double> row);
  void add(int group, double value) { add(group, std::span(&value, 1)); }
  void reserve(std::size_t n);

  std::size_t size() const { return groups_.size(); }
  bool empty() const { return groups_.empty(); }
  std::span<const int> groups() const { return groups_; }
  const std::vector<std::string>& column_names() const { return names_; }
  std::size_t column_index(std::string_view name) const;
  std::span<const double> column(std::size_t index) const {
    return columns_[index];
  }
  std::span<const double> column(std::string_view name) const {
    return columns_[column_index(name)];
  }
  std::array<std::size_t, 2> group_sizes() const;
  // Values of `column` for records in `group`, in record order.
  std::vector<double> values_of(int group, std::size_t column) const;

  // Rows at the given positions, in the given order.
  GroupedDataset select(std::span<const std::size_t> rows) const;

 private:
  std::vector<std::string> names_;
  std::vector<int> groups_;
  std::vector<std::vector<double>> columns_;
};

// Per-(group, bin) counts, group-major: index = group * bin_count + bin.
struct GroupedHistogram {
  BinningSpec spec;
  std::vector<std::int64_t> counts;
  std::int64_t total_n = 0;

  std::size_t bin_count() const { return spec.bin_count(); }
  std::int64_t count(int group, std::size_t bin) const {
    return counts[static_cast<std::size_t>(group) * bin_count() + bin];
  }
};

std::vector<std::size_t> discretize(std::span<const double> values,
                                    const BinningSpec& spec);

GroupedHistogram build_histogram(const GroupedDataset& data,
                                 const BinningSpec& spec,
                                 std::string_view column = "value");

// Emits counts[g*B + i] records (g, midpoint(i)) for every cell.
GroupedDataset samples_from_counts(std::span<const std::int64_t> counts,
                                   const BinningSpec& spec);

// Kaggle cardiovascular file: value = BMI from weight (kg) and height (cm),
// group = cardio label. Comma or semicolon delimited, header required.
GroupedDataset load_cardio_csv(const std::string& path);
GroupedDataset parse_cardio_csv(std::istream& in);

// `group,value[,extra...]` files, header optional.
GroupedDataset read_grouped_csv(const std::string& path);
GroupedDataset parse_grouped_csv(std::istream& in);
void write_grouped_csv(const GroupedDataset& data, std::ostream& out);
void write_grouped_csv(const GroupedDataset& data, const std::string& path);

}  // namespace dpvalid

#endif  // DPVALID_DATASET_H_
