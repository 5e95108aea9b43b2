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

#pragma once

#include <rankex/ranker.hpp>

#include <cstdint>
#include <vector>

namespace rankex {

struct OracleResult {
  std::vector<FeatureId> best_subset;
  double best_validity = -1.0;
  std::uint64_t subsets_evaluated = 0;
};

std::uint64_t binomial(Index n, Index k);

// Exhaustive search for the k-subset of maximal validity; ties keep the
// lexicographically smallest subset. Throws when C(M, k) exceeds `budget`.
OracleResult brute_force_optimal(const Ranker& model, const QueryGroup& query, int k,
                                 const MaskPolicy& policy, std::uint64_t budget = 1'000'000);

struct SubmodularityProbe {
  double gamma = 1.0;
  std::vector<FeatureId> witness_l;
  std::vector<FeatureId> witness_s;
  // Added to validity to make the set function nonnegative.
  double shift = 1.0;
  std::uint64_t pairs_evaluated = 0;
  // (L, S) with zero joint gain but nonzero singleton gains.
  std::uint64_t pairs_skipped = 0;
};

enum class EnumerationOrder { kForward, kReverse };

// gamma_{U,k} of g(A) = validity(A) + 1, minimised over L subset of U and
// nonempty S subset of U \ L with |S| <= k. Requires |U| <= 12.
SubmodularityProbe submodularity_ratio(const Ranker& model, const QueryGroup& query,
                                       const std::vector<FeatureId>& universe, int k,
                                       const MaskPolicy& policy,
                                       EnumerationOrder order = EnumerationOrder::kForward);

}  // namespace rankex
