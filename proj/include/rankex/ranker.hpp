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

#include <rankex/letor.hpp>
#include <rankex/types.hpp>

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rankex {

// A subset F' of the feature universe {0..M-1}.
class FeatureMask {
 public:
  FeatureMask() = default;
  explicit FeatureMask(Index universe_size) : active_(universe_size, false) {}
  FeatureMask(Index universe_size, std::span<const FeatureId> active);

  static FeatureMask full(Index universe_size);
  static FeatureMask none(Index universe_size) { return FeatureMask(universe_size); }

  Index universe_size() const { return static_cast<Index>(active_.size()); }
  bool contains(FeatureId f) const { return active_.at(static_cast<std::size_t>(f)); }
  Index count() const;

  void insert(FeatureId f);
  void erase(FeatureId f);
  FeatureMask with(FeatureId f) const;
  FeatureMask complement() const;
  std::vector<FeatureId> active() const;

  bool operator==(const FeatureMask&) const = default;

 private:
  std::vector<bool> active_;
};

enum class MaskMode { kZero, kMean };

// How masked-out features are substituted before scoring.
struct MaskPolicy {
  MaskMode mode = MaskMode::kZero;
  VecX fill;  // per-feature substitution value

  static MaskPolicy zero(Index feature_count);
  static MaskPolicy mean(const VecX& feature_means);
  static MaskPolicy from_mode(MaskMode mode, const Dataset& background);
};

MaskMode parse_mask_mode(const std::string& text);
std::string to_string(MaskMode mode);

// Replaces the inactive coordinates of every row by the policy's fill values.
MatX apply_mask(const MatX& docs, const FeatureMask& mask, const MaskPolicy& policy);
VecX apply_mask(const VecX& doc, const FeatureMask& mask, const MaskPolicy& policy);

// A strict ranking: `order` lists doc indices best first, ties in score broken
// by ascending doc index. `position[d]` is the rank of doc d (0 = top).
struct Ranking {
  std::vector<Index> order;
  std::vector<Index> position;
  VecX scores;

  Index size() const { return static_cast<Index>(order.size()); }

  static Ranking from_scores(const VecX& scores);
  static Ranking from_order(std::vector<Index> order);
};

enum class RankerKind { kPointwiseLinear, kPairwiseLogistic, kTreeEnsemble, kPlanted, kExternal };

std::string to_string(RankerKind kind);

// Black-box scoring interface. Implementations are immutable after
// construction; `score_query` must be deterministic.
class Ranker {
 public:
  virtual ~Ranker() = default;

  virtual RankerKind kind() const = 0;
  virtual Index feature_count() const = 0;

  // Score of a single document in isolation.
  virtual double score(const VecX& doc) const = 0;

  // Scores of all documents of one query (rows of `docs`). Rankers whose
  // output depends on the whole list override this.
  virtual VecX score_query(const MatX& docs) const;
};

using RankerPtr = std::shared_ptr<const Ranker>;

class LinearRanker final : public Ranker {
 public:
  explicit LinearRanker(VecX weights, double bias = 0.0)
      : weights_(std::move(weights)), bias_(bias) {}

  RankerKind kind() const override { return RankerKind::kPointwiseLinear; }
  Index feature_count() const override { return weights_.size(); }
  double score(const VecX& doc) const override;
  VecX score_query(const MatX& docs) const override;

  const VecX& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  VecX weights_;
  double bias_;
};

// P(i > j) = sigmoid(w . (x_i - x_j)). A document's query score is the mean
// of P(i > j) over the other documents; its standalone score is w . x.
class PairwiseLogisticRanker final : public Ranker {
 public:
  explicit PairwiseLogisticRanker(VecX weights) : weights_(std::move(weights)) {}

  RankerKind kind() const override { return RankerKind::kPairwiseLogistic; }
  Index feature_count() const override { return weights_.size(); }
  double score(const VecX& doc) const override { return weights_.dot(doc); }
  VecX score_query(const MatX& docs) const override;

  double preference(const VecX& upper, const VecX& lower) const;
  const VecX& weights() const { return weights_; }

 private:
  VecX weights_;
};

struct TreeNode {
  // feature < 0 marks a leaf.
  FeatureId feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

// Binary regression tree; x[feature] <= threshold descends left.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(const VecX& x) const;
};

class TreeEnsembleRanker final : public Ranker {
 public:
  TreeEnsembleRanker(Index feature_count, double base_score, double shrinkage,
                     std::vector<RegressionTree> trees)
      : feature_count_(feature_count),
        base_score_(base_score),
        shrinkage_(shrinkage),
        trees_(std::move(trees)) {}

  RankerKind kind() const override { return RankerKind::kTreeEnsemble; }
  Index feature_count() const override { return feature_count_; }
  double score(const VecX& doc) const override;

  double base_score() const { return base_score_; }
  double shrinkage() const { return shrinkage_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }

 private:
  Index feature_count_;
  double base_score_;
  double shrinkage_;
  std::vector<RegressionTree> trees_;
};

// Ground-truth model of synthetic suites: linear terms plus pairwise
// multiplicative interactions.
class PlantedRanker final : public Ranker {
 public:
  struct Interaction {
    FeatureId a;
    FeatureId b;
    double weight;
  };

  PlantedRanker(VecX weights, std::vector<Interaction> interactions)
      : weights_(std::move(weights)), interactions_(std::move(interactions)) {}

  RankerKind kind() const override { return RankerKind::kPlanted; }
  Index feature_count() const override { return weights_.size(); }
  double score(const VecX& doc) const override;

  const VecX& weights() const { return weights_; }
  const std::vector<Interaction>& interactions() const { return interactions_; }

 private:
  VecX weights_;
  std::vector<Interaction> interactions_;
};

// Scores the document after substituting masked-out features.
double masked_score(const Ranker& model, const DocVector& doc, const FeatureMask& mask,
                    const MaskPolicy& policy);

VecX masked_query_scores(const Ranker& model, const QueryGroup& query, const FeatureMask& mask,
                         const MaskPolicy& policy);

Ranking rank(const Ranker& model, const QueryGroup& query, const FeatureMask& mask,
             const MaskPolicy& policy);

// Unmasked ranking R(q, F).
Ranking rank(const Ranker& model, const QueryGroup& query);

// ---------------------------------------------------------------------------
// Training

struct LinearTrainOptions {
  double l2 = 0.0;
  bool fit_intercept = true;
};

std::shared_ptr<LinearRanker> train_pointwise_linear(const Dataset& train,
                                                     const LinearTrainOptions& options = {});

struct PairwiseTrainOptions {
  int epochs = 20;
  double learning_rate = 0.05;
  std::size_t pairs_per_query = 100;
  std::uint64_t seed = 1;
  // Train on z-scored features and fold the scale back into the weights.
  bool standardize = true;
};

std::shared_ptr<PairwiseLogisticRanker> train_pairwise_logistic(
    const Dataset& train, const PairwiseTrainOptions& options = {});

// Mean logistic loss -log sigmoid(w.(x_i - x_j)) over every pair with
// label_i > label_j.
double pairwise_logistic_loss(const PairwiseLogisticRanker& model, const Dataset& data);

struct TreeTrainOptions {
  int n_trees = 100;
  int max_depth = 4;
  double learning_rate = 0.1;
  Index min_leaf = 5;
  // Fraction of documents drawn (without replacement) per tree.
  double subsample = 1.0;
  std::uint64_t seed = 1;
};

std::shared_ptr<TreeEnsembleRanker> train_tree_ensemble(const Dataset& train,
                                                        const TreeTrainOptions& options = {});

// Per-round training MSE, recorded when `loss_trace` is non-null.
std::shared_ptr<TreeEnsembleRanker> train_tree_ensemble(const Dataset& train,
                                                        const TreeTrainOptions& options,
                                                        std::vector<double>* loss_trace);

// ---------------------------------------------------------------------------
// External scorer: a child process speaking
//   SCORE v1,...,vM\n  ->  <float>\n      QUIT\n terminates.

class ExternalScorerError : public Error {
 public:
  using Error::Error;
};

class ExternalScorer final : public Ranker {
 public:
  ExternalScorer(const std::string& command, Index feature_count);
  ~ExternalScorer() override;

  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  RankerKind kind() const override { return RankerKind::kExternal; }
  Index feature_count() const override { return feature_count_; }
  double score(const VecX& doc) const override;

  const std::string& command() const { return command_; }

 private:
  struct Process;

  std::string command_;
  Index feature_count_;
  std::unique_ptr<Process> process_;
};

std::shared_ptr<ExternalScorer> external_scorer(const std::string& command, Index feature_count);

// ---------------------------------------------------------------------------
// Versioned text dump of model parameters.

void save_model(std::ostream& out, const Ranker& model);
RankerPtr load_model(std::istream& in);
void save_model_file(const std::string& path, const Ranker& model);
RankerPtr load_model_file(const std::string& path);

}  // namespace rankex
