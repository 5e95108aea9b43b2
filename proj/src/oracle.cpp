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

#include <rankex/oracle.hpp>

#include <rankex/metrics.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace rankex {

std::uint64_t binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // Saturates at uint64 max.
  unsigned __int128 result = 1;
  for (Index i = 1; i <= k; ++i) {
    result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (result > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(result);
}

OracleResult brute_force_optimal(const Ranker& model, const QueryGroup& query, int k,
                                 const MaskPolicy& policy, std::uint64_t budget) {
  const Index m = model.feature_count();
  if (k < 0 || k > m) throw Error("oracle: k=" + std::to_string(k) + " outside [0, " + std::to_string(m) + "]");
  if (query.size() < 2) throw Error("oracle: query " + query.qid + " has fewer than 2 documents");
  const std::uint64_t n_subsets = binomial(m, k);
  if (n_subsets > budget) {
    throw Error("oracle: C(" + std::to_string(m) + ", " + std::to_string(k) + ") = " +
                std::to_string(n_subsets) + " subsets exceeds budget " + std::to_string(budget));
  }
  const Ranking original = rank(model, query);

  OracleResult result;
  std::vector<FeatureId> subset(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
  // Lexicographic enumeration; strict improvement keeps the smallest subset on ties.
  while (true) {
    const double v = validity(model, query, original, FeatureMask(m, subset), policy);
    ++result.subsets_evaluated;
    if (result.subsets_evaluated == 1 || v > result.best_validity) {
      result.best_validity = v;
      result.best_subset = subset;
    }
    int i = k - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == static_cast<FeatureId>(m - k + i)) --i;
    if (i < 0) break;
    ++subset[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
  return result;
}

namespace {

constexpr std::size_t kMaxProbeUniverse = 12;

std::vector<FeatureId> members(std::uint32_t bits, const std::vector<FeatureId>& universe) {
  std::vector<FeatureId> out;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (bits & (1U << i)) out.push_back(universe[i]);
  }
  return out;
}

}  // namespace

SubmodularityProbe submodularity_ratio(const Ranker& model, const QueryGroup& query,
                                       const std::vector<FeatureId>& universe, int k,
                                       const MaskPolicy& policy, EnumerationOrder order) {
  if (universe.size() > kMaxProbeUniverse) {
    throw Error("submodularity probe supports |U| <= " + std::to_string(kMaxProbeUniverse) +
                ", got " + std::to_string(universe.size()));
  }
  if (k < 1) throw Error("submodularity probe: k must be >= 1");
  if (query.size() < 2) throw Error("submodularity probe: query needs at least 2 documents");
  const Index m = model.feature_count();
  for (FeatureId f : universe) {
    if (f < 0 || f >= m) throw Error("submodularity probe: feature outside model");
  }

  SubmodularityProbe probe;
  const Ranking original = rank(model, query);
  const std::uint32_t n_sets = 1U << universe.size();
  std::vector<double> g(n_sets);
  for (std::uint32_t bits = 0; bits < n_sets; ++bits) {
    const auto ids = members(bits, universe);
    g[bits] = validity(model, query, original, FeatureMask(m, ids), policy) + probe.shift;
  }

  bool found = false;
  auto visit = [&](std::uint32_t l, std::uint32_t s) {
    const double joint = g[l | s] - g[l];
    double singles = 0.0;
    for (std::size_t i = 0; i < universe.size(); ++i) {
      if (s & (1U << i)) singles += g[l | (1U << i)] - g[l];
    }
    ++probe.pairs_evaluated;
    double ratio = 0.0;
    if (joint == 0.0) {
      if (singles != 0.0) {
        ++probe.pairs_skipped;
        return;
      }
      ratio = 1.0;
    } else {
      ratio = singles / joint;
    }
    if (!found || ratio < probe.gamma) {
      found = true;
      probe.gamma = ratio;
      probe.witness_l = members(l, universe);
      probe.witness_s = members(s, universe);
    }
  };

  auto visit_all = [&](std::uint32_t l) {
    const std::uint32_t rest = (n_sets - 1) & ~l;
    // Nonempty subsets of `rest` with at most k members.
    std::vector<std::uint32_t> subsets;
    for (std::uint32_t s = rest; s != 0; s = (s - 1) & rest) {
      if (std::popcount(s) <= k) subsets.push_back(s);
    }
    if (order == EnumerationOrder::kForward) std::reverse(subsets.begin(), subsets.end());
    for (auto s : subsets) visit(l, s);
  };

  if (order == EnumerationOrder::kForward) {
    for (std::uint32_t l = 0; l < n_sets; ++l) visit_all(l);
  } else {
    for (std::uint32_t l = n_sets; l-- > 0;) visit_all(l);
  }
  if (!found) probe.gamma = 1.0;
  return probe;
}

}  // namespace rankex
