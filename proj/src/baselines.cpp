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

#include <rankex/baselines.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace rankex {

Explanation random_explanation(Index feature_count, int k, std::uint64_t seed) {
  if (k < 0 || k > feature_count) {
    throw Error("random explanation: k=" + std::to_string(k) + " exceeds " +
                std::to_string(feature_count) + " features");
  }
  Explanation ex;
  ex.method = Method::kRandom;
  ex.k_requested = k;
  std::mt19937_64 rng(seed);
  for (std::size_t f : sample_indices(static_cast<std::size_t>(feature_count), static_cast<std::size_t>(k), rng)) {
    ex.selected.push_back(static_cast<FeatureId>(f));
  }
  std::shuffle(ex.selected.begin(), ex.selected.end(), rng);
  return ex;
}

ShapRankBy parse_shap_rank_by(const std::string& text) {
  if (text == "abs") return ShapRankBy::kAbs;
  if (text == "signed") return ShapRankBy::kSigned;
  throw Error("unknown SHAP ranking '" + text + "' (expected abs|signed)");
}

namespace {

double log_binomial(Index n, Index k) {
  return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

// Shapley kernel weight of a coalition with `s` of `m` features on.
double kernel_weight(Index m, Index s) {
  return static_cast<double>(m - 1) /
         (std::exp(log_binomial(m, s)) * static_cast<double>(s) * static_cast<double>(m - s));
}

// Mean model output with `on` features taken from x and the rest from each
// background row.
double coalition_value(const Ranker& model, const VecX& x, const MatX& background,
                       const std::vector<char>& on) {
  VecX y(x.size());
  double total = 0.0;
  for (Index b = 0; b < background.rows(); ++b) {
    for (Index j = 0; j < x.size(); ++j) y(j) = on[static_cast<std::size_t>(j)] ? x(j) : background(b, j);
    total += model.score(y);
  }
  return total / static_cast<double>(background.rows());
}

}  // namespace

ShapAttribution kernel_shap(const Ranker& model, const VecX& x, const MatX& background,
                            const ShapConfig& config) {
  const Index m = x.size();
  if (m < 1) throw Error("kernel_shap: empty feature vector");
  if (background.rows() < 1) throw Error("kernel_shap: empty background");
  if (background.cols() != m) {
    throw Error("kernel_shap: background rows have " + std::to_string(background.cols()) +
                " features, document has " + std::to_string(m));
  }

  // Interior coalitions with their (unnormalised) regression weights.
  std::map<std::vector<char>, double> coalitions;
  const bool exhaustive =
      m <= 20 && (config.exhaustive || (std::ldexp(1.0, static_cast<int>(m)) - 2.0 <= config.n_samples));
  if (config.exhaustive && m > 20) throw Error("kernel_shap: exhaustive mode supports at most 20 features");

  if (exhaustive) {
    const std::uint64_t n_masks = std::uint64_t{1} << m;
    for (std::uint64_t bits = 1; bits + 1 < n_masks; ++bits) {
      std::vector<char> on(static_cast<std::size_t>(m));
      Index s = 0;
      for (Index j = 0; j < m; ++j) {
        on[static_cast<std::size_t>(j)] = (bits >> j) & 1U;
        s += on[static_cast<std::size_t>(j)];
      }
      coalitions.emplace(std::move(on), kernel_weight(m, s));
    }
  } else if (m > 1) {
    // Sizes are drawn in proportion to their total kernel mass; each draw and
    // its complement then carry unit weight.
    std::vector<double> size_mass(static_cast<std::size_t>(m - 1));
    for (Index s = 1; s < m; ++s) {
      size_mass[static_cast<std::size_t>(s - 1)] =
          static_cast<double>(m - 1) / (static_cast<double>(s) * static_cast<double>(m - s));
    }
    std::discrete_distribution<Index> pick_size(size_mass.begin(), size_mass.end());
    std::mt19937_64 rng(config.seed);
    std::vector<FeatureId> ids(static_cast<std::size_t>(m));
    std::iota(ids.begin(), ids.end(), FeatureId{0});
    int drawn = 0;
    while (drawn < config.n_samples) {
      const Index s = pick_size(rng) + 1;
      std::vector<FeatureId> chosen;
      std::sample(ids.begin(), ids.end(), std::back_inserter(chosen), s, rng);
      std::vector<char> on(static_cast<std::size_t>(m), 0);
      for (FeatureId f : chosen) on[static_cast<std::size_t>(f)] = 1;
      coalitions[on] += 1.0;
      ++drawn;
      if (drawn < config.n_samples) {
        for (auto& c : on) c = static_cast<char>(!c);
        coalitions[on] += 1.0;
        ++drawn;
      }
    }
  }

  double interior_total = 0.0;
  for (const auto& [on, w] : coalitions) interior_total += w;

  const Index rows = static_cast<Index>(coalitions.size()) + 2;
  MatX design = MatX::Zero(rows, m + 1);
  VecX target(rows);
  VecX sqrt_w(rows);
  design.col(0).setOnes();

  Index r = 0;
  for (const auto& [on, w] : coalitions) {
    for (Index j = 0; j < m; ++j) design(r, j + 1) = on[static_cast<std::size_t>(j)];
    target(r) = coalition_value(model, x, background, on);
    sqrt_w(r) = std::sqrt(w / interior_total);
    ++r;
  }
  const std::vector<char> all_off(static_cast<std::size_t>(m), 0);
  const std::vector<char> all_on(static_cast<std::size_t>(m), 1);
  target(r) = coalition_value(model, x, background, all_off);
  sqrt_w(r) = std::sqrt(config.boundary_weight);
  ++r;
  design.block(r, 1, 1, m).setOnes();
  target(r) = model.score(x);
  sqrt_w(r) = std::sqrt(config.boundary_weight);

  const MatX a = sqrt_w.asDiagonal() * design;
  const VecX b = sqrt_w.asDiagonal() * target;
  const VecX solution = a.completeOrthogonalDecomposition().solve(b);

  ShapAttribution attr;
  attr.phi0 = solution(0);
  attr.phi = solution.tail(m);
  return attr;
}

ShapAttribution kernel_shap(const Ranker& model, const QueryGroup& query, Index doc,
                            const MatX& background, const ShapConfig& config) {
  if (doc < 0 || doc >= query.size()) throw Error("kernel_shap: document index out of range");
  ShapAttribution attr = kernel_shap(model, query.features.row(doc).transpose(), background, config);
  attr.target_doc = doc;
  return attr;
}

Explanation shap_topk(const Ranker& model, const QueryGroup& query, int k, ShapVariant variant,
                      const MatX& background, const ShapConfig& config, ShapRankBy rank_by) {
  if (query.size() < 1) throw Error("shap_topk: empty query");
  if (k < 1) throw Error("k must be >= 1");
  const Ranking original = rank(model, query);
  const std::size_t top = variant == ShapVariant::kTop1 ? 1 : std::min<std::size_t>(5, original.order.size());

  VecX total = VecX::Zero(model.feature_count());
  for (std::size_t p = 0; p < top; ++p) {
    total += kernel_shap(model, query, original.order[p], background, config).phi;
  }

  std::vector<FeatureId> ids(static_cast<std::size_t>(total.size()));
  std::iota(ids.begin(), ids.end(), FeatureId{0});
  auto key = [&](FeatureId f) { return rank_by == ShapRankBy::kAbs ? std::abs(total(f)) : total(f); };
  std::stable_sort(ids.begin(), ids.end(), [&](FeatureId a, FeatureId b) { return key(a) > key(b); });

  Explanation ex;
  ex.method = variant == ShapVariant::kTop1 ? Method::kShap1 : Method::kShap5;
  ex.k_requested = k;
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), ids.size());
  for (std::size_t i = 0; i < take; ++i) {
    ex.selected.push_back(ids[i]);
    ex.step_utilities.push_back(total(ids[i]));
  }
  return ex;
}

}  // namespace rankex
