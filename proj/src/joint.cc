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

#include "dpvalid/joint.h"

#include <limits>

#include "dpvalid/errors.h"

namespace dpvalid {

JointDomain::JointDomain(std::vector<std::size_t> sizes)
    : sizes_(std::move(sizes)), strides_(sizes_.size()) {
  if (sizes_.empty()) throw ArgumentError("JointDomain: no attributes");
  for (std::size_t a = sizes_.size(); a-- > 0;) {
    if (sizes_[a] == 0) throw ArgumentError("JointDomain: empty attribute");
    strides_[a] = cell_count_;
    cell_count_ *= sizes_[a];
    if (cell_count_ > std::numeric_limits<std::uint32_t>::max()) {
      throw ArgumentError("JointDomain: domain too large");
    }
  }
}

std::size_t JointDomain::cell_of(std::span<const std::size_t> codes) const {
  if (codes.size() != sizes_.size()) {
    throw ArgumentError("JointDomain::cell_of: wrong number of codes");
  }
  std::size_t cell = 0;
  for (std::size_t a = 0; a < codes.size(); ++a) {
    if (codes[a] >= sizes_[a]) throw ArgumentError("JointDomain::cell_of: code out of range");
    cell += codes[a] * strides_[a];
  }
  return cell;
}

std::vector<Marginal> one_and_two_way_marginals(std::size_t attribute_count) {
  std::vector<Marginal> out;
  for (std::size_t a = 0; a < attribute_count; ++a) out.push_back({{a}});
  for (std::size_t a = 0; a < attribute_count; ++a) {
    for (std::size_t b = a + 1; b < attribute_count; ++b) out.push_back({{a, b}});
  }
  return out;
}

Projection::Projection(const JointDomain& domain, const Marginal& marginal)
    : map_(domain.cell_count()) {
  if (marginal.attributes.empty()) throw ArgumentError("Projection: empty marginal");
  for (std::size_t i = 0; i < marginal.attributes.size(); ++i) {
    if (marginal.attributes[i] >= domain.attribute_count() ||
        (i > 0 && marginal.attributes[i] <= marginal.attributes[i - 1])) {
      throw ArgumentError(
          "Projection: marginal attributes must be increasing and in range");
    }
  }
  size_ = 1;
  for (auto a : marginal.attributes) size_ *= domain.size(a);
  for (std::size_t cell = 0; cell < domain.cell_count(); ++cell) {
    std::size_t index = 0;
    for (auto a : marginal.attributes) {
      index = index * domain.size(a) + domain.code_of(cell, a);
    }
    map_[cell] = static_cast<std::uint32_t>(index);
  }
}

std::vector<double> Projection::apply(std::span<const double> joint) const {
  if (joint.size() != map_.size()) throw ArgumentError("Projection: joint size mismatch");
  std::vector<double> out(size_, 0.0);
  for (std::size_t cell = 0; cell < joint.size(); ++cell) out[map_[cell]] += joint[cell];
  return out;
}

std::vector<std::uint32_t> Projection::cells_of(std::size_t target) const {
  std::vector<std::uint32_t> cells;
  for (std::size_t cell = 0; cell < map_.size(); ++cell) {
    if (map_[cell] == target) cells.push_back(static_cast<std::uint32_t>(cell));
  }
  return cells;
}

JointDomain DiscreteSchema::domain() const {
  if (columns.size() != binnings.size() || columns.empty()) {
    throw ArgumentError("DiscreteSchema: need one binning per column");
  }
  std::vector<std::size_t> sizes{2};
  for (const auto& b : binnings) sizes.push_back(b.bin_count());
  return JointDomain(std::move(sizes));
}

std::vector<double> joint_counts(const GroupedDataset& data,
                                 const DiscreteSchema& schema) {
  const JointDomain domain = schema.domain();
  std::vector<std::span<const double>> columns;
  for (const auto& name : schema.columns) columns.push_back(data.column(name));
  std::vector<double> counts(domain.cell_count(), 0.0);
  std::vector<std::size_t> codes(domain.attribute_count());
  const auto groups = data.groups();
  for (std::size_t r = 0; r < data.size(); ++r) {
    codes[0] = static_cast<std::size_t>(groups[r]);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      codes[c + 1] = schema.binnings[c].bin_of(columns[c][r]);
    }
    counts[domain.cell_of(codes)] += 1.0;
  }
  return counts;
}

GroupedDataset decode_cells(std::span<const std::size_t> cells,
                            const DiscreteSchema& schema) {
  const JointDomain domain = schema.domain();
  GroupedDataset out(schema.columns);
  out.reserve(cells.size());
  std::vector<double> row(schema.columns.size());
  for (auto cell : cells) {
    if (cell >= domain.cell_count()) throw ArgumentError("decode_cells: cell out of range");
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = schema.binnings[c].midpoint(domain.code_of(cell, c + 1));
    }
    out.add(static_cast<int>(domain.code_of(cell, 0)), row);
  }
  return out;
}

}  // namespace dpvalid
