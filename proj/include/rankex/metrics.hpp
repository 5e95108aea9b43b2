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

#include <span>

namespace rankex {

struct ExplanationScore {
  double validity = 0.0;
  double completeness = 0.0;
};

// Tau-a between two strict rankings of the same documents:
// (concordant - discordant) / (n(n-1)/2). O(n log n).
double kendall_tau(const Ranking& a, const Ranking& b);

// Same, for two position vectors (position[d] = rank of doc d).
double kendall_tau(std::span<const Index> position_a, std::span<const Index> position_b);

// tau(R(q, F'), R(q, F)).
double validity(const Ranker& model, const QueryGroup& query, const FeatureMask& mask,
                const MaskPolicy& policy);
double validity(const Ranker& model, const QueryGroup& query, const Ranking& original,
                const FeatureMask& mask, const MaskPolicy& policy);

// -tau(R(q, F \ F'), R(q, F)).
double completeness(const Ranker& model, const QueryGroup& query, const FeatureMask& mask,
                    const MaskPolicy& policy);
double completeness(const Ranker& model, const QueryGroup& query, const Ranking& original,
                    const FeatureMask& mask, const MaskPolicy& policy);

ExplanationScore score_explanation(const Ranker& model, const QueryGroup& query,
                                   const Ranking& original, const FeatureMask& mask,
                                   const MaskPolicy& policy);

// NDCG@k with gain 2^label - 1 and log2(rank + 2) discount; 0 when the ideal
// DCG is 0.
double ndcg_at(int k, const Ranking& ranking, const VecXi& labels);

}  // namespace rankex
