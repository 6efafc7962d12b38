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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dpvalid/errors.h"
#include "dpvalid/random.h"

namespace dpvalid {
namespace {

TEST(Binning, PaperConventions) {
  const auto bmi = BinningSpec::bmi_24();
  const auto psa = BinningSpec::psa_40();
  const auto gauss = BinningSpec::gaussian_100();
  EXPECT_EQ(bmi.bin_count(), 24u);
  EXPECT_EQ(psa.bin_count(), 40u);
  EXPECT_EQ(gauss.bin_count(), 100u);
  EXPECT_EQ(bmi.bin_of(17.2), 0u);
  EXPECT_EQ(bmi.bin_of(18.0), 1u);
  EXPECT_EQ(bmi.bin_of(39.99), 22u);
  EXPECT_EQ(bmi.bin_of(55.0), 23u);
  EXPECT_EQ(psa.bin_of(45.0), 39u);
  EXPECT_EQ(psa.bin_of(0.2), 0u);
  EXPECT_EQ(psa.bin_of(1.5), 0u);
  EXPECT_EQ(gauss.bin_of(50.2), 49u);
  EXPECT_DOUBLE_EQ(gauss.midpoint(49), 50.0);
  EXPECT_EQ(gauss.bin_of(-1000.0), 0u);
  EXPECT_EQ(gauss.bin_of(1000.0), 99u);
}

TEST(Binning, RejectsInvalidEdges) {
  EXPECT_THROW(BinningSpec::from_edges({0, 1}), ArgumentError);  // one bin
  EXPECT_THROW(BinningSpec::from_edges({0, 2, 1}), ArgumentError);
  EXPECT_THROW(BinningSpec::from_edges({0, 1, 1}), ArgumentError);
  EXPECT_THROW(BinningSpec::parse("nonsense"), ArgumentError);
}

TEST(Binning, ParseDescribeRoundTrip) {
  for (const auto* text : {"gaussian100", "bmi24", "psa40", "uniform:0:10:5",
                           "integer:1:5", "edges:0,1.5,4"}) {
    const auto spec = BinningSpec::parse(text);
    EXPECT_EQ(BinningSpec::parse(spec.describe()), spec) << text;
  }
  EXPECT_EQ(BinningSpec::parse("gaussian100"), BinningSpec::gaussian_100());
}

TEST(Binning, TotalAndIdempotentOnMidpoints) {
  RandomSource rng(1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t bins = 2 + rng.below(30);
    const double lo = rng.uniform() * 100 - 50;
    const auto spec = BinningSpec::uniform(lo, lo + 1 + rng.uniform() * 50, bins);
    for (std::size_t b = 0; b < bins; ++b) EXPECT_EQ(spec.bin_of(spec.midpoint(b)), b);
    for (int i = 0; i < 50; ++i) {
      const double v = (rng.uniform() - 0.5) * 400;
      const std::size_t b = spec.bin_of(v);
      ASSERT_LT(b, bins);
      const auto e = spec.edges();
      if (b > 0) EXPECT_GE(v, e[b]);
      if (b + 1 < bins) EXPECT_LT(v, e[b + 1]);
    }
  }
}

TEST(Discretize, RejectsNaN) {
  const std::vector<double> v{1.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(discretize(v, BinningSpec::gaussian_100()), ArgumentError);
}

TEST(Histogram, CountsCells) {
  GroupedDataset data;
  for (int i = 0; i < 3; ++i) data.add(0, 50.0);
  const auto h = build_histogram(data, BinningSpec::gaussian_100());
  EXPECT_EQ(h.total_n, 3);
  EXPECT_EQ(h.count(0, 49), 3);
  std::int64_t sum = 0;
  for (auto c : h.counts) sum += c;
  EXPECT_EQ(sum, 3);
  EXPECT_THROW(build_histogram(GroupedDataset(), BinningSpec::gaussian_100()),
               ArgumentError);
}

TEST(Histogram, ConservesPerGroupCounts) {
  RandomSource rng(2);
  for (int t = 0; t < 100; ++t) {
    GroupedDataset data;
    std::size_t n[2] = {0, 0};
    const std::size_t size = 1 + rng.below(200);
    for (std::size_t i = 0; i < size; ++i) {
      const int g = static_cast<int>(rng.below(2));
      ++n[g];
      data.add(g, gaussian_sample(50, 10, rng));
    }
    const auto h = build_histogram(data, BinningSpec::gaussian_100());
    std::int64_t s[2] = {0, 0};
    for (int g = 0; g < 2; ++g) {
      for (std::size_t b = 0; b < 100; ++b) s[g] += h.count(g, b);
    }
    EXPECT_EQ(s[0], static_cast<std::int64_t>(n[0]));
    EXPECT_EQ(s[1], static_cast<std::int64_t>(n[1]));
    EXPECT_EQ(h.total_n, static_cast<std::int64_t>(size));
  }
}

TEST(SamplesFromCounts, MidpointsAndInverse) {
  const auto spec = BinningSpec::from_edges({0, 1, 2});
  const std::vector<std::int64_t> counts{2, 0, 0, 1};
  const auto data = samples_from_counts(counts, spec);
  ASSERT_EQ(data.size(), 3u);
  EXPECT_EQ(data.values_of(0, 0), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(data.values_of(1, 0), (std::vector<double>{1.5}));
  EXPECT_TRUE(samples_from_counts(std::vector<std::int64_t>(4, 0), spec).empty());

  RandomSource rng(3);
  const auto bmi = BinningSpec::bmi_24();
  for (int t = 0; t < 50; ++t) {
    std::vector<std::int64_t> c(48);
    for (auto& x : c) x = static_cast<std::int64_t>(rng.below(5));
    c[0] += 1;
    const auto h = build_histogram(samples_from_counts(c, bmi), bmi);
    EXPECT_EQ(h.counts, c);
  }
}

TEST(CardioCsv, BmiAndLabels) {
  std::istringstream in(
      "id;age;gender;height;weight;ap_hi;ap_lo;cholesterol;gluc;smoke;alco;active;cardio\n"
      "0;18393;2;170;70.0;110;80;1;1;0;0;1;0\n"
      "1;20228;1;156;85.0;140;90;3;1;0;0;1;1\n");
  const auto data = parse_cardio_csv(in);
  ASSERT_EQ(data.size(), 2u);
  EXPECT_NEAR(data.column(0)[0], 24.2215, 1e-4);
  EXPECT_EQ(data.groups()[0], 0);
  EXPECT_EQ(data.groups()[1], 1);
  EXPECT_NEAR(data.column(0)[1], 85.0 / (1.56 * 1.56), 1e-12);
}

TEST(CardioCsv, CommaDelimited) {
  std::istringstream in("height,weight,cardio\n170,70,1\n");
  const auto data = parse_cardio_csv(in);
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data.groups()[0], 1);
}

TEST(CardioCsv, MissingColumnAndBadRows) {
  std::istringstream missing("id;height;weight\n1;170;70\n");
  EXPECT_THROW(parse_cardio_csv(missing), IngestionError);
  std::istringstream bad("height;weight;cardio\n170;70;0\n170;abc;1\n0;70;1\n160;60;2\n");
  try {
    parse_cardio_csv(bad);
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    // Data rows, counted from 1 after the header.
    EXPECT_EQ(e.rows(), (std::vector<std::size_t>{2, 3, 4}));
  }
}

TEST(CardioCsv, FullKaggleFileIfPresent) {
  const std::string path = std::string(DPVALID_SOURCE_DIR) + "/data/cardio_train.csv";
  if (!std::filesystem::exists(path)) GTEST_SKIP() << "cardio_train.csv not present";
  const auto data = load_cardio_csv(path);
  EXPECT_EQ(data.size(), 70000u);
  const auto h = build_histogram(data, BinningSpec::bmi_24());
  std::int64_t totals[2] = {0, 0};
  for (int g = 0; g < 2; ++g) {
    for (std::size_t b = 0; b < 24; ++b) totals[g] += h.count(g, b);
  }
  EXPECT_EQ(totals[0], 35021);
  EXPECT_EQ(totals[1], 34979);
}

TEST(GroupedCsv, RoundTripPreservesOrderAndValues) {
  GroupedDataset data({"age", "psa"});
  const double r1[] = {61.5, 4.25}, r2[] = {70, 0.1}, r3[] = {55.125, 12};
  data.add(1, r1);
  data.add(0, r2);
  data.add(1, r3);
  std::stringstream buffer;
  write_grouped_csv(data, buffer);
  EXPECT_EQ(buffer.str().substr(0, buffer.str().find('\n')), "group,age,psa");
  const auto back = parse_grouped_csv(buffer);
  EXPECT_EQ(back.column_names(), data.column_names());
  EXPECT_EQ(std::vector<int>(back.groups().begin(), back.groups().end()),
            (std::vector<int>{1, 0, 1}));
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back.column(c)[i], data.column(c)[i]);
  }
}

TEST(GroupedCsv, RejectsBadLabelsAndValues) {
  std::istringstream label("group,value\n0,1\n2,3\n");
  EXPECT_THROW(parse_grouped_csv(label), IngestionError);
  std::istringstream value("group,value\n0,x\n");
  EXPECT_THROW(parse_grouped_csv(value), IngestionError);
  std::istringstream inf("group,value\n0,inf\n");
  EXPECT_THROW(parse_grouped_csv(inf), IngestionError);
}

TEST(GroupedDataset, RejectsInvalidRecords) {
  GroupedDataset data;
  EXPECT_THROW(data.add(2, 1.0), ArgumentError);
  EXPECT_THROW(data.add(0, std::numeric_limits<double>::infinity()), ArgumentError);
  const double two[] = {1, 2};
  EXPECT_THROW(data.add(0, two), ArgumentError);
}

}  // namespace
}  // namespace dpvalid
