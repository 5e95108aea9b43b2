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

// Reference implementations used only by tests. Each one takes a different
// route from the library code it checks.

#include <rankex/letor.hpp>
#include <rankex/ranker.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace rankex::testing {

// O(n^2) pair counter over two orders (best first).
inline double brute_force_tau(const std::vector<Index>& order_a, const std::vector<Index>& order_b) {
  const std::size_t n = order_a.size();
  std::vector<std::size_t> pos_a(n), pos_b(n);
  for (std::size_t p = 0; p < n; ++p) {
    pos_a[static_cast<std::size_t>(order_a[p])] = p;
    pos_b[static_cast<std::size_t>(order_b[p])] = p;
  }
  long concordant = 0;
  long discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool above_a = pos_a[i] < pos_a[j];
      const bool above_b = pos_b[i] < pos_b[j];
      (above_a == above_b ? concordant : discordant) += 1;
    }
  }
  return static_cast<double>(concordant - discordant) / static_cast<double>(n * (n - 1) / 2);
}

// Order by descending score, ties by index, via repeated selection.
inline std::vector<Index> selection_order(const std::vector<double>& scores) {
  std::vector<Index> order;
  std::vector<bool> used(scores.size(), false);
  for (std::size_t step = 0; step < scores.size(); ++step) {
    std::size_t best = scores.size();
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (used[i]) continue;
      if (best == scores.size() || scores[i] > scores[best]) best = i;
    }
    used[best] = true;
    order.push_back(static_cast<Index>(best));
  }
  return order;
}

// Walks a tree node list recursively.
inline double eval_node(const RegressionTree& tree, int node, const std::vector<double>& x) {
  const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
  if (nd.feature < 0) return nd.value;
  return eval_node(tree, x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right, x);
}

inline double eval_ensemble(const TreeEnsembleRanker& model, const std::vector<double>& x) {
  double s = model.base_score();
  for (const auto& t : model.trees()) s += model.shrinkage() * eval_node(t, 0, x);
  return s;
}

// Gaussian elimination with partial pivoting on a dense copy.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// Exact Shapley values of v(S) = mean_b f(x_S, b_rest) by enumerating all
// subsets and weighting marginal contributions.
inline std::vector<double> exact_shapley(const Ranker& model, const std::vector<double>& x,
                                         const std::vector<std::vector<double>>& background) {
  const std::size_t m = x.size();
  const std::size_t n_sets = std::size_t{1} << m;
  std::vector<double> value(n_sets, 0.0);
  for (std::size_t s = 0; s < n_sets; ++s) {
    double total = 0.0;
    for (const auto& b : background) {
      VecX y(static_cast<Index>(m));
      for (std::size_t j = 0; j < m; ++j) y(static_cast<Index>(j)) = (s >> j) & 1U ? x[j] : b[j];
      total += model.score(y);
    }
    value[s] = total / static_cast<double>(background.size());
  }
  auto factorial = [](std::size_t n) {
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
  };
  std::vector<double> phi(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t s = 0; s < n_sets; ++s) {
      if ((s >> i) & 1U) continue;
      const std::size_t size = static_cast<std::size_t>(__builtin_popcountll(s));
      const double w = factorial(size) * factorial(m - size - 1) / factorial(m);
      phi[i] += w * (value[s | (std::size_t{1} << i)] - value[s]);
    }
  }
  return phi;
}

inline QueryGroup make_query(const std::string& qid, const std::vector<std::vector<double>>& rows,
                             std::vector<int> labels = {}) {
  QueryGroup q;
  q.qid = qid;
  const auto n = static_cast<Index>(rows.size());
  const auto m = static_cast<Index>(rows.front().size());
  q.features.resize(n, m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) q.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  if (labels.empty()) labels.assign(rows.size(), 0);
  q.labels = Eigen::Map<const VecXi>(labels.data(), n);
  q.comments.assign(rows.size(), std::string());
  return q;
}

inline QueryGroup random_query(const std::string& qid, Index n, Index m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> grade(0, 2);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(m)));
  std::vector<int> labels;
  for (auto& r : rows) {
    for (auto& v : r) v = unit(rng);
    labels.push_back(grade(rng));
  }
  return make_query(qid, rows, labels);
}

inline std::vector<double> to_std(const VecX& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace rankex::testing
