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

#include <rankex/ranker.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rankex {

namespace {

void stack_rows(const Dataset& data, MatX& x, VecX& y) {
  const Index n = data.doc_count();
  x.resize(n, data.feature_count);
  y.resize(n);
  Index row = 0;
  for (const auto& q : data.queries) {
    x.middleRows(row, q.size()) = q.features;
    y.segment(row, q.size()) = q.labels.cast<double>();
    row += q.size();
  }
}

double log_sigmoid(double t) {
  // log(1 / (1 + exp(-t))) without overflow
  return t >= 0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
}

}  // namespace

std::shared_ptr<LinearRanker> train_pointwise_linear(const Dataset& train,
                                                     const LinearTrainOptions& options) {
  if (train.queries.empty() || train.doc_count() == 0) throw Error("empty training set");
  if (options.l2 < 0) throw Error("l2 must be nonnegative");
  MatX x;
  VecX y;
  stack_rows(train, x, y);

  VecX x_mean = VecX::Zero(x.cols());
  double y_mean = 0.0;
  if (options.fit_intercept) {
    x_mean = x.colwise().mean().transpose();
    y_mean = y.mean();
    x.rowwise() -= x_mean.transpose();
    y.array() -= y_mean;
  }

  MatX gram = x.transpose() * x;
  gram.diagonal().array() += options.l2;
  const VecX rhs = x.transpose() * y;

  VecX w;
  if (options.l2 > 0) {
    w = gram.ldlt().solve(rhs);
  } else {
    Eigen::ColPivHouseholderQR<MatX> qr(gram);
    if (qr.rank() < gram.cols()) {
      throw Error("normal equations are singular (rank " + std::to_string(qr.rank()) + " < " +
                  std::to_string(gram.cols()) + "); use l2 > 0");
    }
    w = qr.solve(rhs);
  }
  const double bias = options.fit_intercept ? y_mean - x_mean.dot(w) : 0.0;
  return std::make_shared<LinearRanker>(std::move(w), bias);
}

std::shared_ptr<PairwiseLogisticRanker> train_pairwise_logistic(
    const Dataset& train, const PairwiseTrainOptions& options) {
  const Index m = train.feature_count;
  VecX scale = VecX::Ones(m);
  if (options.standardize) {
    MatX x;
    VecX y;
    stack_rows(train, x, y);
    const VecX mean = x.colwise().mean().transpose();
    for (Index j = 0; j < m; ++j) {
      const double var = (x.col(j).array() - mean(j)).square().mean();
      scale(j) = var > 0 ? std::sqrt(var) : 0.0;
    }
  }
  VecX inv_scale(m);
  for (Index j = 0; j < m; ++j) inv_scale(j) = scale(j) > 0 ? 1.0 / scale(j) : 0.0;

  std::vector<std::vector<std::pair<Index, Index>>> query_pairs;
  std::size_t total_pairs = 0;
  for (const auto& q : train.queries) {
    std::vector<std::pair<Index, Index>> pairs;
    for (Index i = 0; i < q.size(); ++i) {
      for (Index j = 0; j < q.size(); ++j) {
        if (q.labels(i) > q.labels(j)) pairs.emplace_back(i, j);
      }
    }
    total_pairs += pairs.size();
    query_pairs.push_back(std::move(pairs));
  }
  if (total_pairs == 0) throw Error("no trainable pairs: every query has a single label grade");

  std::mt19937_64 rng(options.seed);
  VecX w = VecX::Zero(m);
  std::vector<std::pair<Index, Index>> batch;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t qi = 0; qi < train.queries.size(); ++qi) {
      const auto& q = train.queries[qi];
      const auto& pairs = query_pairs[qi];
      batch.clear();
      if (pairs.size() > options.pairs_per_query) {
        std::sample(pairs.begin(), pairs.end(), std::back_inserter(batch),
                    options.pairs_per_query, rng);
      } else {
        batch = pairs;
      }
      for (auto [i, j] : batch) {
        const VecX d = (q.features.row(i) - q.features.row(j)).transpose().cwiseProduct(inv_scale);
        const double g = 1.0 / (1.0 + std::exp(w.dot(d)));  // 1 - sigmoid(w.d)
        w += options.learning_rate * g * d;
      }
    }
  }
  return std::make_shared<PairwiseLogisticRanker>(w.cwiseProduct(inv_scale));
}

double pairwise_logistic_loss(const PairwiseLogisticRanker& model, const Dataset& data) {
  double loss = 0.0;
  std::size_t n = 0;
  for (const auto& q : data.queries) {
    const VecX s = q.features * model.weights();
    for (Index i = 0; i < q.size(); ++i) {
      for (Index j = 0; j < q.size(); ++j) {
        if (q.labels(i) > q.labels(j)) {
          loss -= log_sigmoid(s(i) - s(j));
          ++n;
        }
      }
    }
  }
  return n == 0 ? 0.0 : loss / static_cast<double>(n);
}

namespace {

constexpr double kMinSplitGain = 1e-12;

struct SplitCandidate {
  FeatureId feature = -1;
  double threshold = 0.0;
  double gain = kMinSplitGain;
};

struct ScanState {
  Index count = 0;
  double sum = 0.0;
  double last = 0.0;
};

// Grows one tree level by level. Rows with node_of[r] < 0 are not used.
RegressionTree fit_tree(const MatX& x, const VecX& residual,
                        const std::vector<std::vector<Index>>& sorted, std::vector<int> node_of,
                        const TreeTrainOptions& options) {
  RegressionTree tree;
  tree.nodes.emplace_back();
  std::vector<int> frontier = {0};

  auto node_totals = [&](const std::vector<int>& nodes, std::vector<Index>& count,
                         std::vector<double>& sum, const std::vector<int>& slot) {
    count.assign(nodes.size(), 0);
    sum.assign(nodes.size(), 0.0);
    for (Index r = 0; r < x.rows(); ++r) {
      const int nd = node_of[static_cast<std::size_t>(r)];
      if (nd < 0 || slot[static_cast<std::size_t>(nd)] < 0) continue;
      const auto s = static_cast<std::size_t>(slot[static_cast<std::size_t>(nd)]);
      ++count[s];
      sum[s] += residual(r);
    }
  };

  std::vector<Index> count;
  std::vector<double> sum;
  for (int depth = 0; depth <= options.max_depth && !frontier.empty(); ++depth) {
    std::vector<int> slot(tree.nodes.size(), -1);
    for (std::size_t s = 0; s < frontier.size(); ++s) slot[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);
    node_totals(frontier, count, sum, slot);
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      auto& nd = tree.nodes[static_cast<std::size_t>(frontier[s])];
      nd.value = count[s] > 0 ? sum[s] / static_cast<double>(count[s]) : 0.0;
    }
    if (depth == options.max_depth) break;

    std::vector<SplitCandidate> best(frontier.size());
    std::vector<ScanState> state(frontier.size());
    for (Index j = 0; j < x.cols(); ++j) {
      std::fill(state.begin(), state.end(), ScanState{});
      for (Index r : sorted[static_cast<std::size_t>(j)]) {
        const int nd = node_of[static_cast<std::size_t>(r)];
        if (nd < 0 || slot[static_cast<std::size_t>(nd)] < 0) continue;
        const auto s = static_cast<std::size_t>(slot[static_cast<std::size_t>(nd)]);
        auto& st = state[s];
        const double v = x(r, j);
        if (st.count > 0 && v > st.last) {
          const Index n_left = st.count;
          const Index n_right = count[s] - st.count;
          if (n_left >= options.min_leaf && n_right >= options.min_leaf) {
            const double sum_right = sum[s] - st.sum;
            const double gain = st.sum * st.sum / static_cast<double>(n_left) +
                                sum_right * sum_right / static_cast<double>(n_right) -
                                sum[s] * sum[s] / static_cast<double>(count[s]);
            if (gain > best[s].gain) best[s] = {static_cast<FeatureId>(j), 0.5 * (st.last + v), gain};
          }
        }
        ++st.count;
        st.sum += residual(r);
        st.last = v;
      }
    }

    std::vector<int> next;
    for (std::size_t s = 0; s < frontier.size(); ++s) {
      if (best[s].feature < 0) continue;
      const int parent = frontier[s];
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& nd = tree.nodes[static_cast<std::size_t>(parent)];
      nd.feature = best[s].feature;
      nd.threshold = best[s].threshold;
      nd.left = left;
      nd.right = left + 1;
      next.push_back(left);
      next.push_back(left + 1);
    }
    for (Index r = 0; r < x.rows(); ++r) {
      const int nd = node_of[static_cast<std::size_t>(r)];
      if (nd < 0) continue;
      const auto& node = tree.nodes[static_cast<std::size_t>(nd)];
      if (node.is_leaf()) continue;
      node_of[static_cast<std::size_t>(r)] = x(r, node.feature) <= node.threshold ? node.left : node.right;
    }
    frontier = std::move(next);
  }
  return tree;
}

}  // namespace

std::shared_ptr<TreeEnsembleRanker> train_tree_ensemble(const Dataset& train,
                                                        const TreeTrainOptions& options) {
  return train_tree_ensemble(train, options, nullptr);
}

std::shared_ptr<TreeEnsembleRanker> train_tree_ensemble(const Dataset& train,
                                                        const TreeTrainOptions& options,
                                                        std::vector<double>* loss_trace) {
  if (train.queries.empty() || train.doc_count() == 0) throw Error("empty training set");
  if (options.n_trees < 1) throw Error("n_trees must be >= 1");
  if (options.max_depth < 1) throw Error("max_depth must be >= 1");
  if (options.min_leaf < 1) throw Error("min_leaf must be >= 1");
  if (!(options.subsample > 0.0 && options.subsample <= 1.0)) throw Error("subsample must be in (0, 1]");
  if (!(options.learning_rate > 0.0 && options.learning_rate <= 1.0)) {
    throw Error("learning_rate must be in (0, 1]");
  }

  MatX x;
  VecX y;
  stack_rows(train, x, y);
  const Index n = x.rows();

  std::vector<std::vector<Index>> sorted(static_cast<std::size_t>(x.cols()));
  for (Index j = 0; j < x.cols(); ++j) {
    auto& ids = sorted[static_cast<std::size_t>(j)];
    ids.resize(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), Index{0});
    std::stable_sort(ids.begin(), ids.end(), [&](Index a, Index b) { return x(a, j) < x(b, j); });
  }

  const double base = y.mean();
  VecX prediction = VecX::Constant(n, base);
  std::mt19937_64 rng(options.seed);
  std::vector<RegressionTree> trees;
  trees.reserve(static_cast<std::size_t>(options.n_trees));
  const auto per_tree = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(options.subsample * static_cast<double>(n))));

  for (int t = 0; t < options.n_trees; ++t) {
    const VecX residual = y - prediction;
    std::vector<int> node_of(static_cast<std::size_t>(n), 0);
    if (per_tree < static_cast<std::size_t>(n)) {
      std::fill(node_of.begin(), node_of.end(), -1);
      for (std::size_t r : sample_indices(static_cast<std::size_t>(n), per_tree, rng)) node_of[r] = 0;
    }
    RegressionTree tree = fit_tree(x, residual, sorted, std::move(node_of), options);
    for (Index r = 0; r < n; ++r) prediction(r) += options.learning_rate * tree.predict(x.row(r).transpose());
    trees.push_back(std::move(tree));
    if (loss_trace != nullptr) loss_trace->push_back((y - prediction).squaredNorm() / static_cast<double>(n));
  }
  return std::make_shared<TreeEnsembleRanker>(x.cols(), base, options.learning_rate, std::move(trees));
}

}  // namespace rankex
