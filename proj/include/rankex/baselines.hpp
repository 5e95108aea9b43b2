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

#include <rankex/explain.hpp>

namespace rankex {

// Uniform k-subset of {0..M-1}; throws when k > M.
Explanation random_explanation(Index feature_count, int k, std::uint64_t seed);

struct ShapConfig {
  int n_samples = 200;
  int background_size = 500;
  std::uint64_t seed = 0;
  // Enumerate every coalition regardless of n_samples (M <= 20).
  bool exhaustive = false;
  // Regression weight of the all-on and all-off coalitions; interior kernel
  // weights are normalized to sum to 1.
  double boundary_weight = 1e6;
};

struct ShapAttribution {
  double phi0 = 0.0;
  VecX phi;
  Index target_doc = 0;
};

// Kernel SHAP attribution for one document of `query`. Off-coalition
// features take the values of each background row in turn and the model
// output is averaged over rows.
ShapAttribution kernel_shap(const Ranker& model, const QueryGroup& query, Index doc,
                            const MatX& background, const ShapConfig& config);

ShapAttribution kernel_shap(const Ranker& model, const VecX& x, const MatX& background,
                            const ShapConfig& config);

enum class ShapVariant { kTop1, kTop5 };
enum class ShapRankBy { kAbs, kSigned };

ShapRankBy parse_shap_rank_by(const std::string& text);

// Top-k features by aggregated attribution over the top-1 (or top-5) documents
// of the unmasked ranking. Ties go to the lower feature id.
Explanation shap_topk(const Ranker& model, const QueryGroup& query, int k, ShapVariant variant,
                      const MatX& background, const ShapConfig& config,
                      ShapRankBy rank_by = ShapRankBy::kAbs);

}  // namespace rankex
