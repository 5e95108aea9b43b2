// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <rankex/metrics.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rankex {
namespace {

using testing::make_query;

Ranking order(std::vector<Index> o) { return Ranking::from_order(std::move(o)); }

TEST(KendallTauTest, HandExamples) {
  EXPECT_DOUBLE_EQ(kendall_tau(order({0, 1, 2}), order({0, 1, 2})), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(order({0, 1, 2}), order({2, 1, 0})), -1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(order({0, 1, 2}), order({0, 2, 1})), 1.0 / 3.0);
}

TEST(KendallTauTest, Errors) {
  EXPECT_THROW(kendall_tau(order({0}), order({0})), Error);
  EXPECT_THROW(kendall_tau(order({0, 1}), order({0, 1, 2})), Error);
}

TEST(KendallTauTest, MatchesBruteForceAndIsSymmetric) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = static_cast<std::size_t>(2 + trial % 30);
    std::vector<Index> a(n), b(n);
    std::iota(a.begin(), a.end(), Index{0});
    std::iota(b.begin(), b.end(), Index{0});
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    const double tau = kendall_tau(order(a), order(b));
    EXPECT_DOUBLE_EQ(tau, testing::brute_force_tau(a, b));
    EXPECT_DOUBLE_EQ(tau, kendall_tau(order(b), order(a)));
    std::vector<Index> rev(a.rbegin(), a.rend());
    EXPECT_DOUBLE_EQ(kendall_tau(order(a), order(rev)), -1.0);
  }
}

TEST(ValidityTest, FullMaskIsOne) {
  std::mt19937_64 rng(1);
  const auto q = testing::random_query("q", 10, 4, rng);
  LinearRanker model(VecX::Map(std::vector<double>{1, -2, 0.5, 3}.data(), 4));
  EXPECT_DOUBLE_EQ(validity(model, q, FeatureMask::full(4), MaskPolicy::zero(4)), 1.0);
  EXPECT_DOUBLE_EQ(completeness(model, q, FeatureMask::none(4), MaskPolicy::zero(4)), -1.0);
}

TEST(ValidityTest, MaskedToTiesFallsBackToIndexOrder) {
  LinearRanker model(VecX::Map(std::vector<double>{1, 0}.data(), 2));
  const auto q = make_query("q", {{0.2, 0.5}, {0.9, 0.1}, {0.5, 0.3}});
  const std::vector<FeatureId> keep = {1};
  // True order (1, 2, 0) against index order (0, 1, 2): one concordant pair of three.
  EXPECT_DOUBLE_EQ(validity(model, q, FeatureMask(2, keep), MaskPolicy::zero(2)), -1.0 / 3.0);
}

LinearRanker planted_model() {
  VecX w = VecX::Zero(10);
  w(2) = 1.0;
  w(5) = 2.0;
  w(7) = 3.0;
  return LinearRanker(w);
}

TEST(ValidityTest, PlantedFeaturesAreValid) {
  const auto model = planted_model();
  std::mt19937_64 rng(3);
  const std::vector<FeatureId> planted = {2, 5, 7};
  for (int i = 0; i < 10; ++i) {
    const auto q = testing::random_query("q", 12, 10, rng);
    EXPECT_DOUBLE_EQ(validity(model, q, FeatureMask(10, planted), MaskPolicy::zero(10)), 1.0);
  }
}

TEST(CompletenessTest, PlantedComplementCollapsesToIndexOrder) {
  const auto model = planted_model();
  std::vector<std::vector<double>> rows(4, std::vector<double>(10, 0.1));
  rows[0][7] = 0.1;  // scores: 0.1*(1+2)+0.3 = 0.6
  rows[1][7] = 0.9;  // 0.3 + 2.7 = 3.0
  rows[2][5] = 0.8;  // 0.1 + 1.6 + 0.3 = 2.0
  rows[3][2] = 0.0;  // 0.2 + 0.3 = 0.5
  const auto q = make_query("q", rows);
  // True order (1, 2, 0, 3); complement scores are all 0 -> (0, 1, 2, 3).
  // Pairs: (0,1) D, (0,2) D, (0,3) C, (1,2) C, (1,3) C, (2,3) C -> tau = 2/6.
  const std::vector<FeatureId> planted = {2, 5, 7};
  EXPECT_DOUBLE_EQ(completeness(model, q, FeatureMask(10, planted), MaskPolicy::zero(10)), -2.0 / 6.0);
  EXPECT_DOUBLE_EQ(testing::brute_force_tau({1, 2, 0, 3}, {0, 1, 2, 3}), 2.0 / 6.0);
}

TEST(CompletenessTest, DuplicatedFeaturesValidButNotComplete) {
  LinearRanker model(VecX::Map(std::vector<double>{0.5, 0.5, 0.0}.data(), 3));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 8; ++i) {
    const double v = unit(rng);
    rows.push_back({v, v, unit(rng)});
  }
  const auto q = make_query("dup", rows);
  const std::vector<FeatureId> keep = {0};
  const auto policy = MaskPolicy::zero(3);
  EXPECT_DOUBLE_EQ(validity(model, q, FeatureMask(3, keep), policy), 1.0);
  EXPECT_DOUBLE_EQ(completeness(model, q, FeatureMask(3, keep), policy), -1.0);
}

TEST(NdcgTest, HandArithmetic) {
  VecXi labels(3);
  labels << 3, 1, 0;
  const double dcg = 1.0 + 7.0 / std::log2(3.0);
  const double idcg = 7.0 + 1.0 / std::log2(3.0);
  EXPECT_NEAR(ndcg_at(10, order({1, 0, 2}), labels), dcg / idcg, 1e-15);
  EXPECT_NEAR(ndcg_at(10, order({1, 0, 2}), labels), 0.7098, 1e-4);
  EXPECT_DOUBLE_EQ(ndcg_at(10, order({0, 1, 2}), labels), 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at(1, order({1, 0, 2}), labels), 1.0 / 7.0);
}

TEST(NdcgTest, ZeroLabelsAndBadK) {
  VecXi labels = VecXi::Zero(3);
  EXPECT_DOUBLE_EQ(ndcg_at(5, order({2, 0, 1}), labels), 0.0);
  EXPECT_THROW(ndcg_at(0, order({0, 1, 2}), labels), Error);
}

TEST(NdcgTest, AlwaysInUnitInterval) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> grade(0, 4);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 15;
    VecXi labels(static_cast<Index>(n));
    for (Index i = 0; i < labels.size(); ++i) labels(i) = grade(rng);
    std::vector<Index> o(n);
    std::iota(o.begin(), o.end(), Index{0});
    std::shuffle(o.begin(), o.end(), rng);
    const double v = ndcg_at(1 + t % 12, order(o), labels);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 + 1e-15);
  }
}

}  // namespace
}  // namespace rankex
