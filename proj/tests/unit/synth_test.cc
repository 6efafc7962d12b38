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

#include "dpvalid/synth.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "dpvalid/errors.h"
#include "dpvalid/special_functions.h"

namespace dpvalid {
namespace {

GroupedHistogram histogram_from(const std::vector<std::int64_t>& counts,
                                const BinningSpec& spec) {
  GroupedHistogram h{spec, counts, 0};
  h.total_n = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  return h;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::fabs(a[i] - b[i]);
  return tv / 2;
}

double spent(const std::vector<BudgetCharge>& charges) {
  double s = 0;
  for (const auto& c : charges) s += c.epsilon;
  return s;
}

TEST(Budget, ValidationAndLedger) {
  EXPECT_THROW((PrivacyBudget{0.0, 0.0}.validate()), ArgumentError);
  EXPECT_THROW((PrivacyBudget{1.0, 1.0}.validate()), ArgumentError);
  EXPECT_THROW((PrivacyBudget{1.0, 1e-6}.validate_pure()), ArgumentError);
  BudgetLedger ledger({1.0, 0.0});
  ledger.charge("a", 0.25);
  EXPECT_THROW(ledger.require_exhausted(), std::logic_error);
  ledger.charge("b", 0.75);
  EXPECT_NO_THROW(ledger.require_exhausted());
}

TEST(Perturbed, HugeEpsilonIsIdentity) {
  const auto spec = BinningSpec::gaussian_100();
  std::vector<std::int64_t> counts(200, 0);
  RandomSource data_rng(1);
  for (int i = 0; i < 500; ++i) ++counts[data_rng.below(200)];
  const auto h = histogram_from(counts, spec);
  int identical = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    RandomSource rng(seed);
    identical += perturbed_counts(h, {1e6, 0.0}, rng) == counts;
  }
  EXPECT_GE(identical, 999);
}

TEST(Perturbed, OutputNonNegativeAndChargesFullBudget) {
  const auto spec = BinningSpec::from_edges({0, 1, 2});
  const auto h = histogram_from({3, 0, 0, 3}, spec);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RandomSource rng(seed);
    const auto s = perturbed_histogram(h, {0.5, 0.0}, rng);
    const auto back = s.data.empty() ? std::vector<std::int64_t>(4, 0)
                                     : build_histogram(s.data, spec).counts;
    for (auto c : back) EXPECT_GE(c, 0);
    EXPECT_EQ(s.provenance.synthetic_n, s.data.size());
    EXPECT_EQ(s.provenance.original_n, 6u);
    EXPECT_DOUBLE_EQ(spent(s.provenance.charges), 0.5);
  }
}

TEST(Perturbed, MeanSizeMatchesPmfOracle) {
  // Counts [[100,0],[0,100]], eps = 0.1: scale 2/eps = 20.
  const double b = 20.0;
  auto expected_clamped = [&](double c) {
    double e = 0;
    for (int k = -4000; k <= 4000; ++k) e += std::max(0.0, c + k) * discrete_laplace_pmf(k, b);
    return e;
  };
  const double oracle = 2 * expected_clamped(100) + 2 * expected_clamped(0);
  EXPECT_GE(oracle, 160);
  EXPECT_LE(oracle, 240);

  const auto h = histogram_from({100, 0, 0, 100}, BinningSpec::from_edges({0, 1, 2}));
  RandomSource rng(7);
  double sum = 0, sq = 0;
  const int runs = 2000;
  for (int r = 0; r < runs; ++r) {
    RandomSource child = rng.child(static_cast<std::uint64_t>(r));
    const double size = static_cast<double>(perturbed_histogram(h, {0.1, 0.0}, child).data.size());
    sum += size;
    sq += size * size;
  }
  const double mean = sum / runs;
  const double se = std::sqrt((sq / runs - mean * mean) / runs);
  EXPECT_GE(mean, 160);
  EXPECT_LE(mean, 240);
  EXPECT_NEAR(mean, oracle, 4 * se);
}

TEST(Perturbed, NormalizedVariantKeepsOriginalSize) {
  const auto h = histogram_from({40, 10, 0, 50}, BinningSpec::from_edges({0, 1, 2}));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource rng(seed);
    PerturbedOptions options;
    options.normalize_to_original = true;
    const auto counts = perturbed_counts(h, {1.0, 0.0}, rng, options);
    EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}), 100);
  }
}

TEST(Smoothed, DirectProbabilities) {
  const std::vector<std::int64_t> counts{10, 0};
  const auto p = smoothed_probabilities(counts, 5, 10.0);
  EXPECT_NEAR(p[0], 11.0 / 12.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 12.0, 1e-15);
  EXPECT_THROW(smoothed_probabilities(counts, 0, 1.0), ArgumentError);
}

TEST(Smoothed, TinyEpsilonIsNearUniform) {
  const std::vector<std::int64_t> counts{500, 3, 0, 17, 2000, 1};
  const auto p = smoothed_probabilities(counts, 100, 1e-6);
  const std::vector<double> uniform(6, 1.0 / 6);
  EXPECT_LT(total_variation(p, uniform), 1e-3);
}

TEST(Smoothed, ExponentialFormMatchesDirectForm) {
  RandomSource rng(8);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t cells = 2 + rng.below(200);
    std::vector<std::int64_t> counts(cells);
    for (auto& c : counts) c = rng.below(4) == 0 ? 0 : static_cast<std::int64_t>(rng.below(10000));
    const std::size_t m = 1 + rng.below(5000);
    const double eps = std::pow(10.0, -2.0 + 3.0 * rng.uniform());
    const auto a = smoothed_probabilities(counts, m, eps);
    const auto b = smoothed_probabilities_exponential(counts, m, eps);
    for (std::size_t i = 0; i < cells; ++i) {
      ASSERT_LE(std::fabs(a[i] - b[i]), 1e-12 * a[i]) << t << " cell " << i;
    }
  }
}

TEST(Smoothed, ExactSizeAndLargeEpsilonResamplesEmpirical) {
  const auto spec = BinningSpec::from_edges({0, 1, 2, 3});
  const auto h = histogram_from({60, 0, 30, 0, 90, 120}, spec);
  RandomSource rng(9);
  for (std::size_t m : {1u, 7u, 50u}) {
    EXPECT_EQ(smoothed_histogram(h, {1.0, 0.0}, m, rng).data.size(), m);
  }
  // eps -> infinity: multinomial draws from the empirical distribution.
  const std::size_t m = 30000;
  const auto s = smoothed_histogram(h, {1e9, 0.0}, m, rng);
  const auto back = build_histogram(s.data, spec);
  double stat = 0;
  int df = -1;
  for (std::size_t i = 0; i < 6; ++i) {
    const double e = static_cast<double>(h.counts[i]) / 300.0 * m;
    if (e == 0) {
      EXPECT_EQ(back.counts[i], 0);
      continue;
    }
    const double o = static_cast<double>(back.counts[i]);
    stat += (o - e) * (o - e) / e;
    ++df;
  }
  EXPECT_GT(chi_squared_sf(stat, df), 0.01);
  EXPECT_DOUBLE_EQ(spent(s.provenance.charges), 1e9);
}

TEST(Mwem, NearNoiselessFitsTwoCells) {
  const std::vector<double> counts{75, 25};
  const JointDomain domain({2});
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource rng(seed);
    MwemOptions options;
    options.iterations = 2;
    const auto fit = mwem_fit(counts, domain, {1000.0, 0.0}, rng, options);
    worst = std::max(worst, total_variation(fit.distribution, {0.75, 0.25}));
  }
  EXPECT_LE(worst, 0.02);
}

TEST(Mwem, SingleNoiselessQueryReachesItsCount) {
  std::vector<double> counts(10);
  RandomSource data(10);
  for (auto& c : counts) c = static_cast<double>(data.below(50));
  const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
  const JointDomain domain({10});
  RandomSource rng(11);
  MwemOptions options;
  options.iterations = 1;
  options.update_passes = 2000;
  const auto fit = mwem_fit(counts, domain, {1e6, 0.0}, rng, options);
  const std::size_t q = fit.selected[0].second;
  EXPECT_NEAR(n * fit.distribution[q], counts[q], 1.0);
}

TEST(Mwem, StaysADistributionAndReadsPrivatelyOnly) {
  RandomSource data(12);
  std::vector<double> counts(2 * 20);
  for (auto& c : counts) c = static_cast<double>(data.below(30));
  const JointDomain domain({2, 20});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource rng(seed);
    MwemOptions options;
    options.iterations = 10;
    const auto fit = mwem_fit(counts, domain, {0.5, 0.0}, rng, options);
    ASSERT_EQ(fit.history.size(), 10u);
    for (const auto& a : fit.history) {
      double total = 0;
      for (double v : a) {
        EXPECT_GE(v, 0.0);
        total += v;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
    // One score read and one measurement per iteration.
    EXPECT_EQ(fit.private_reads, 20u);
    EXPECT_NEAR(spent(fit.charges), 0.5, 1e-12);
    // Without replacement.
    for (std::size_t i = 0; i < fit.selected.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) EXPECT_NE(fit.selected[i], fit.selected[j]);
    }
  }
}

TEST(Mwem, ArgumentErrors) {
  const std::vector<double> counts{1, 2};
  const JointDomain domain({2});
  RandomSource rng(1);
  MwemOptions options;
  options.iterations = 3;
  EXPECT_THROW(mwem_fit(counts, domain, {1.0, 0.0}, rng, options), ArgumentError);
  options.iterations = 0;
  EXPECT_THROW(mwem_fit(counts, domain, {1.0, 0.0}, rng, options), ArgumentError);
}

TEST(Mwem, HistogramOverloadKeepsSize) {
  const auto h = histogram_from({5, 10, 0, 3, 2, 0}, BinningSpec::from_edges({0, 1, 2, 3}));
  RandomSource rng(13);
  const auto s = mwem(h, {1.0, 0.0}, rng, MwemOptions{.iterations = 3});
  EXPECT_EQ(s.data.size(), 20u);
  EXPECT_EQ(s.provenance.method, "mwem");
}

TEST(Ipf, FullJointIsCopied) {
  const JointDomain domain({2, 5});
  RandomSource rng(14);
  std::vector<double> joint(10);
  for (auto& v : joint) v = rng.uniform();
  const double total = std::accumulate(joint.begin(), joint.end(), 0.0);
  for (auto& v : joint) v /= total;
  const std::vector<Marginal> marginals{{{0, 1}}};
  const std::vector<std::vector<double>> targets{joint};
  const auto fit = fit_ipf(domain, marginals, targets);
  EXPECT_LT(total_variation(fit.joint, joint), 1e-6);
  EXPECT_TRUE(fit.converged);
}

TEST(Ipf, IndependentOneWaysGiveProduct) {
  const JointDomain domain({3, 4});
  const std::vector<double> a{0.2, 0.5, 0.3}, b{0.1, 0.2, 0.3, 0.4};
  const std::vector<Marginal> marginals{{{0}}, {{1}}};
  const std::vector<std::vector<double>> targets{a, b};
  const auto fit = fit_ipf(domain, marginals, targets);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(fit.joint[i * 4 + j], a[i] * b[j], 1e-6);
  }
}

TEST(Ipf, InconsistentTargetsStayNormalized) {
  const JointDomain domain({2, 3});
  const std::vector<Marginal> marginals{{{0}}, {{1}}, {{0, 1}}};
  const std::vector<std::vector<double>> targets{
      {0.9, 0.1}, {0.0, 0.0, 1.0}, {0.1, 0.1, 0.1, 0.3, 0.2, 0.2}};
  IpfOptions options;
  options.max_sweeps = 50;
  const auto fit = fit_ipf(domain, marginals, targets, options);
  double total = 0;
  for (double v : fit.joint) {
    EXPECT_GE(v, 0.0);
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(MarginalIpf, HugeEpsilonReproducesEmpiricalJoint) {
  DiscreteSchema schema{{"value"}, {BinningSpec::uniform(0, 10, 5)}};
  GroupedDataset data;
  RandomSource data_rng(15);
  for (int i = 0; i < 400; ++i) {
    const int g = static_cast<int>(data_rng.below(2));
    data.add(g, std::clamp(gaussian_sample(4 + 2 * g, 2, data_rng), 0.0, 9.99));
  }
  const auto empirical = joint_counts(data, schema);
  std::vector<double> p(empirical);
  for (auto& v : p) v /= 400.0;
  const std::vector<Marginal> full{{{0, 1}}};
  RandomSource rng(16);
  const auto r = marginal_ipf(data, schema, {1e6, 0.0}, full, rng);
  EXPECT_LT(total_variation(r.fit.joint, p), 1e-6);
  EXPECT_EQ(r.synthetic.data.size(), 400u);
  EXPECT_NEAR(spent(r.synthetic.provenance.charges), 1e6, 1e-6);
}

TEST(Synthesizers, DeterministicGivenSeed) {
  const auto h = histogram_from({5, 10, 0, 3, 2, 0}, BinningSpec::from_edges({0, 1, 2, 3}));
  for (int method = 0; method < 3; ++method) {
    RandomSource a(77), b(77);
    auto run = [&](RandomSource& rng) {
      switch (method) {
        case 0: return perturbed_histogram(h, {1.0, 0.0}, rng).data;
        case 1: return smoothed_histogram(h, {1.0, 0.0}, 25, rng).data;
        default: return mwem(h, {1.0, 0.0}, rng, MwemOptions{.iterations = 3}).data;
      }
    };
    const auto x = run(a), y = run(b);
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_EQ(x.groups()[i], y.groups()[i]);
      EXPECT_EQ(x.column(0)[i], y.column(0)[i]);
    }
  }
}

TEST(Synthesizers, ParseNames) {
  EXPECT_EQ(parse_synthesizer("perturbed"), Synthesizer::kPerturbed);
  EXPECT_EQ(parse_synthesizer("marginal_ipf"), Synthesizer::kMarginalIpf);
  try {
    parse_synthesizer("dp-gan");
    FAIL();
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown method"), std::string::npos);
  }
}

}  // namespace
}  // namespace dpvalid
