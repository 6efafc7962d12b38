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

#include <gtest/gtest.h>

#include <numeric>

#include "dpvalid/errors.h"
#include "dpvalid/random.h"

namespace dpvalid {
namespace {

TEST(JointDomain, CellCodeRoundTrip) {
  const JointDomain d({2, 3, 4});
  EXPECT_EQ(d.cell_count(), 24u);
  for (std::size_t cell = 0; cell < d.cell_count(); ++cell) {
    std::vector<std::size_t> codes{d.code_of(cell, 0), d.code_of(cell, 1), d.code_of(cell, 2)};
    EXPECT_EQ(d.cell_of(codes), cell);
  }
  // Attribute 0 varies slowest, matching the group-major histogram layout.
  EXPECT_EQ(d.code_of(12, 0), 1u);
  EXPECT_EQ(d.code_of(12, 2), 0u);
}

TEST(Marginals, OneAndTwoWay) {
  const auto m = one_and_two_way_marginals(3);
  ASSERT_EQ(m.size(), 6u);
  EXPECT_EQ(m[0].attributes, (std::vector<std::size_t>{0}));
  EXPECT_EQ(m.back().attributes, (std::vector<std::size_t>{1, 2}));
}

TEST(Projection, SumsPreserveMass) {
  const JointDomain d({2, 3, 4});
  RandomSource rng(1);
  std::vector<double> joint(d.cell_count());
  for (auto& v : joint) v = rng.uniform();
  const double total = std::accumulate(joint.begin(), joint.end(), 0.0);
  for (const auto& m : one_and_two_way_marginals(3)) {
    const Projection p(d, m);
    const auto marg = p.apply(joint);
    EXPECT_NEAR(std::accumulate(marg.begin(), marg.end(), 0.0), total, 1e-12);
    std::size_t cells = 0;
    for (std::size_t t = 0; t < p.size(); ++t) {
      for (auto c : p.cells_of(t)) EXPECT_EQ(p[c], t);
      cells += p.cells_of(t).size();
    }
    EXPECT_EQ(cells, d.cell_count());
  }
}

TEST(Schema, JointCountsAndDecode) {
  DiscreteSchema schema{{"a", "b"}, {BinningSpec::integer_centered(0, 2),
                                      BinningSpec::uniform(0, 10, 2)}};
  GroupedDataset data({"a", "b"});
  const double r1[] = {1, 7}, r2[] = {2, 1};
  data.add(0, r1);
  data.add(1, r2);
  data.add(1, r2);
  const auto counts = joint_counts(data, schema);
  const auto domain = schema.domain();
  ASSERT_EQ(counts.size(), 12u);
  const std::size_t c1[] = {0, 1, 1}, c2[] = {1, 2, 0};
  EXPECT_EQ(counts[domain.cell_of(c1)], 1.0);
  EXPECT_EQ(counts[domain.cell_of(c2)], 2.0);
  const std::vector<std::size_t> cells{domain.cell_of(c2)};
  const auto decoded = decode_cells(cells, schema);
  EXPECT_EQ(decoded.groups()[0], 1);
  EXPECT_EQ(decoded.column("a")[0], 2.0);
  EXPECT_EQ(decoded.column("b")[0], 2.5);
}

}  // namespace
}  // namespace dpvalid
