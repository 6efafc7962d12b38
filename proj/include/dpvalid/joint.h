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

#ifndef DPVALID_JOINT_H_
#define DPVALID_JOINT_H_

// Discrete joint domains over (group, binned columns...). Attribute 0 is
// always the group label; cells are row-major with attribute 0 slowest, so a
// bivariate joint has the same layout as GroupedHistogram::counts.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpvalid/dataset.h"

namespace dpvalid {

class JointDomain {
 public:
  explicit JointDomain(std::vector<std::size_t> sizes);

  std::size_t attribute_count() const { return sizes_.size(); }
  std::size_t size(std::size_t attribute) const { return sizes_[attribute]; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t cell_count() const { return cell_count_; }

  std::size_t cell_of(std::span<const std::size_t> codes) const;
  std::size_t code_of(std::size_t cell, std::size_t attribute) const {
    return (cell / strides_[attribute]) % sizes_[attribute];
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t cell_count_ = 1;
};

// A subset of attributes, listed in increasing order.
struct Marginal {
  std::vector<std::size_t> attributes;

  friend bool operator==(const Marginal&, const Marginal&) = default;
};

// Every one-way and two-way marginal over `attribute_count` attributes.
std::vector<Marginal> one_and_two_way_marginals(std::size_t attribute_count);

// Precomputed cell -> marginal-cell map.
class Projection {
 public:
  Projection(const JointDomain& domain, const Marginal& marginal);

  std::size_t size() const { return size_; }
  std::uint32_t operator[](std::size_t cell) const { return map_[cell]; }

  // Sums `joint` into marginal cells.
  std::vector<double> apply(std::span<const double> joint) const;
  // Joint cells belonging to marginal cell `target`.
  std::vector<std::uint32_t> cells_of(std::size_t target) const;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint32_t> map_;
};

// How each dataset column maps onto a joint attribute.
struct DiscreteSchema {
  std::vector<std::string> columns;
  std::vector<BinningSpec> binnings;

  static DiscreteSchema bivariate(const BinningSpec& spec) {
    return DiscreteSchema{{"value"}, {spec}};
  }

  JointDomain domain() const;
};

// Joint cell counts of `data` under `schema` (group first).
std::vector<double> joint_counts(const GroupedDataset& data,
                                 const DiscreteSchema& schema);

// Decodes joint cells into records: group from attribute 0, every other column
// at its bin midpoint.
GroupedDataset decode_cells(std::span<const std::size_t> cells,
                            const DiscreteSchema& schema);

}  // namespace dpvalid

#endif  // DPVALID_JOINT_H_
