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

#include <rankex/metrics.hpp>
#include <rankex/ranker.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rankex {

// A pair ordered upper-above-lower by the original ranking, weighted by the
// difference of their ranks.
struct ConcordantPair {
  Index upper = 0;
  Index lower = 0;
  double weight = 1.0;
};

struct PairSet {
  std::vector<ConcordantPair> pairs;
  std::vector<bool> covered;

  std::size_t size() const { return pairs.size(); }
  std::size_t uncovered_count() const;
};

enum class Method { kRandom, kShap1, kShap5, kGreedy, kGreedyCover, kGreedyCoverEps };

std::string to_string(Method method);
Method parse_method(const std::string& text);
bool is_greedy(Method method);

enum class EpsilonMode { kNone, kZero, kMean, kFixed };

struct Epsilon {
  EpsilonMode mode = EpsilonMode::kNone;
  double value = 0.0;  // used by kFixed

  static Epsilon none() { return {EpsilonMode::kNone, 0.0}; }
  static Epsilon zero() { return {EpsilonMode::kZero, 0.0}; }
  static Epsilon mean() { return {EpsilonMode::kMean, 0.0}; }
  static Epsilon fixed(double v) { return {EpsilonMode::kFixed, v}; }
};

// Parses "zero", "mean" or a number.
Epsilon parse_epsilon(const std::string& text);

struct ExplainConfig {
  int k = 5;
  std::size_t pair_sample_size = 50;
  Epsilon epsilon = Epsilon::mean();
  std::uint64_t seed = 0;
  int n_seeds = 3;
  MaskPolicy mask_policy;
};

struct Explanation {
  Method method = Method::kGreedy;
  std::vector<FeatureId> selected;
  std::vector<double> step_utilities;
  int k_requested = 0;
  double validity = 0.0;
  double completeness = 0.0;
  // Uncovered pair count after each step (cover variants only).
  std::vector<std::size_t> uncovered_after_step;

  FeatureMask mask(Index feature_count) const;
};

// All concordant pairs when there are at most `sample_size`, otherwise a
// uniform sample without replacement. Pairs are listed in (upper rank,
// lower rank) order.
PairSet sample_pairs(const Ranking& original, std::size_t sample_size, std::uint64_t seed);

// z = (s(upper) - s(lower)) * w_p, scores taken under mask F' + {f}.
double propensity(const Ranker& model, const QueryGroup& query, const FeatureMask& selected,
                  FeatureId f, const ConcordantPair& pair, const MaskPolicy& policy);

// Sum of propensities over the uncovered pairs.
double utility(const Ranker& model, const QueryGroup& query, const FeatureMask& selected,
               FeatureId f, const PairSet& pairs, const MaskPolicy& policy);

// Coverage threshold for a selected feature's row (already restricted to the
// pairs that were uncovered entering the iteration).
double epsilon_threshold(std::span<const double> row, const Epsilon& epsilon);

// One row of the preference matrix for every candidate feature.
struct PreferenceMatrix {
  std::vector<FeatureId> features;     // candidate rows, ascending
  std::vector<std::size_t> pair_ids;   // uncovered columns, ascending
  MatX cells;                          // features x pair_ids

  VecX utilities() const { return cells.rowwise().sum(); }
};

PreferenceMatrix preference_matrix(const Ranker& model, const QueryGroup& query,
                                   const FeatureMask& selected, const PairSet& pairs,
                                   const MaskPolicy& policy);

// Algorithm without coverage (epsilon mode must be kNone).
Explanation explain_greedy(const Ranker& model, const QueryGroup& query,
                           const ExplainConfig& config);

// Coverage variants (epsilon mode kZero, kMean or kFixed).
Explanation explain_greedy_cover(const Ranker& model, const QueryGroup& query,
                                 const ExplainConfig& config);

// Runs the configured algorithm once per seed feature (the top `n_seeds`
// first-iteration features with positive utility) and keeps the run with the
// highest validity; ties prefer fewer features, then earlier seeds.
Explanation explain_with_seeds(const Ranker& model, const QueryGroup& query,
                               const ExplainConfig& config);

// Single run with an optional forced first feature. Exposed for the prefix
// property and seed experiments.
Explanation explain_run(const Ranker& model, const QueryGroup& query, const Ranking& original,
                        const PairSet& pairs, const ExplainConfig& config,
                        std::optional<FeatureId> forced_first);

}  // namespace rankex
