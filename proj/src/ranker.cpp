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

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rankex {

FeatureMask::FeatureMask(Index universe_size, std::span<const FeatureId> active)
    : active_(static_cast<std::size_t>(universe_size), false) {
  for (FeatureId f : active) insert(f);
}

FeatureMask FeatureMask::full(Index universe_size) {
  FeatureMask m(universe_size);
  std::fill(m.active_.begin(), m.active_.end(), true);
  return m;
}

Index FeatureMask::count() const {
  return static_cast<Index>(std::count(active_.begin(), active_.end(), true));
}

void FeatureMask::insert(FeatureId f) {
  if (f < 0 || f >= universe_size()) {
    throw Error("feature " + std::to_string(f) + " outside universe of size " +
                std::to_string(universe_size()));
  }
  active_[static_cast<std::size_t>(f)] = true;
}

void FeatureMask::erase(FeatureId f) {
  if (f < 0 || f >= universe_size()) return;
  active_[static_cast<std::size_t>(f)] = false;
}

FeatureMask FeatureMask::with(FeatureId f) const {
  FeatureMask m = *this;
  m.insert(f);
  return m;
}

FeatureMask FeatureMask::complement() const {
  FeatureMask m = *this;
  m.active_.flip();
  return m;
}

std::vector<FeatureId> FeatureMask::active() const {
  std::vector<FeatureId> ids;
  for (std::size_t i = 0; i < active_.size(); ++i) {
    if (active_[i]) ids.push_back(static_cast<FeatureId>(i));
  }
  return ids;
}

MaskPolicy MaskPolicy::zero(Index feature_count) {
  return {MaskMode::kZero, VecX::Zero(feature_count)};
}

MaskPolicy MaskPolicy::mean(const VecX& feature_means) { return {MaskMode::kMean, feature_means}; }

MaskPolicy MaskPolicy::from_mode(MaskMode mode, const Dataset& background) {
  return mode == MaskMode::kZero ? zero(background.feature_count) : mean(background.feature_means);
}

MaskMode parse_mask_mode(const std::string& text) {
  if (text == "zero") return MaskMode::kZero;
  if (text == "mean") return MaskMode::kMean;
  throw Error("unknown mask policy '" + text + "' (expected zero|mean)");
}

std::string to_string(MaskMode mode) { return mode == MaskMode::kZero ? "zero" : "mean"; }

MatX apply_mask(const MatX& docs, const FeatureMask& mask, const MaskPolicy& policy) {
  if (docs.cols() != mask.universe_size() || policy.fill.size() != mask.universe_size()) {
    throw Error("mask dimension " + std::to_string(mask.universe_size()) +
                " does not match document dimension " + std::to_string(docs.cols()));
  }
  MatX out = docs;
  for (Index j = 0; j < docs.cols(); ++j) {
    if (!mask.contains(static_cast<FeatureId>(j))) out.col(j).setConstant(policy.fill(j));
  }
  return out;
}

VecX apply_mask(const VecX& doc, const FeatureMask& mask, const MaskPolicy& policy) {
  if (doc.size() != mask.universe_size() || policy.fill.size() != mask.universe_size()) {
    throw Error("mask dimension " + std::to_string(mask.universe_size()) +
                " does not match document dimension " + std::to_string(doc.size()));
  }
  VecX out = doc;
  for (Index j = 0; j < doc.size(); ++j) {
    if (!mask.contains(static_cast<FeatureId>(j))) out(j) = policy.fill(j);
  }
  return out;
}

Ranking Ranking::from_scores(const VecX& scores) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores(a) > scores(b); });
  Ranking r = from_order(std::move(order));
  r.scores = scores;
  return r;
}

Ranking Ranking::from_order(std::vector<Index> order) {
  Ranking r;
  r.position.assign(order.size(), -1);
  for (std::size_t p = 0; p < order.size(); ++p) {
    const Index d = order[p];
    if (d < 0 || d >= static_cast<Index>(order.size()) || r.position[static_cast<std::size_t>(d)] >= 0) {
      throw Error("ranking order is not a permutation");
    }
    r.position[static_cast<std::size_t>(d)] = static_cast<Index>(p);
  }
  r.order = std::move(order);
  return r;
}

std::string to_string(RankerKind kind) {
  switch (kind) {
    case RankerKind::kPointwiseLinear: return "linear";
    case RankerKind::kPairwiseLogistic: return "pairwise";
    case RankerKind::kTreeEnsemble: return "gbdt";
    case RankerKind::kPlanted: return "planted";
    case RankerKind::kExternal: return "external";
  }
  return "unknown";
}

VecX Ranker::score_query(const MatX& docs) const {
  VecX s(docs.rows());
  for (Index i = 0; i < docs.rows(); ++i) s(i) = score(docs.row(i).transpose());
  return s;
}

double LinearRanker::score(const VecX& doc) const { return weights_.dot(doc) + bias_; }

VecX LinearRanker::score_query(const MatX& docs) const {
  return (docs * weights_).array() + bias_;
}

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

double PairwiseLogisticRanker::preference(const VecX& upper, const VecX& lower) const {
  return sigmoid(weights_.dot(upper - lower));
}

VecX PairwiseLogisticRanker::score_query(const MatX& docs) const {
  const Index n = docs.rows();
  if (n == 1) return VecX::Constant(1, 0.5);
  const VecX s = docs * weights_;
  VecX out = VecX::Zero(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double p = sigmoid(s(i) - s(j));
      out(i) += p;
      out(j) += 1.0 - p;
    }
  }
  return out / static_cast<double>(n - 1);
}

double RegressionTree::predict(const VecX& x) const {
  int node = 0;
  while (!nodes[static_cast<std::size_t>(node)].is_leaf()) {
    const auto& nd = nodes[static_cast<std::size_t>(node)];
    node = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(node)].value;
}

double TreeEnsembleRanker::score(const VecX& doc) const {
  double s = base_score_;
  for (const auto& t : trees_) s += shrinkage_ * t.predict(doc);
  return s;
}

double PlantedRanker::score(const VecX& doc) const {
  double s = weights_.dot(doc);
  for (const auto& term : interactions_) s += term.weight * doc(term.a) * doc(term.b);
  return s;
}

double masked_score(const Ranker& model, const DocVector& doc, const FeatureMask& mask,
                    const MaskPolicy& policy) {
  if (doc.features.size() != model.feature_count()) {
    throw Error("document has " + std::to_string(doc.features.size()) +
                " features, model expects " + std::to_string(model.feature_count()));
  }
  return model.score(apply_mask(doc.features, mask, policy));
}

VecX masked_query_scores(const Ranker& model, const QueryGroup& query, const FeatureMask& mask,
                         const MaskPolicy& policy) {
  if (query.feature_count() != model.feature_count()) {
    throw Error("query " + query.qid + " has " + std::to_string(query.feature_count()) +
                " features, model expects " + std::to_string(model.feature_count()));
  }
  return model.score_query(apply_mask(query.features, mask, policy));
}

Ranking rank(const Ranker& model, const QueryGroup& query, const FeatureMask& mask,
             const MaskPolicy& policy) {
  if (query.size() == 0) throw Error("cannot rank an empty query");
  return Ranking::from_scores(masked_query_scores(model, query, mask, policy));
}

Ranking rank(const Ranker& model, const QueryGroup& query) {
  if (query.size() == 0) throw Error("cannot rank an empty query");
  if (query.feature_count() != model.feature_count()) {
    throw Error("query " + query.qid + " has " + std::to_string(query.feature_count()) +
                " features, model expects " + std::to_string(model.feature_count()));
  }
  return Ranking::from_scores(model.score_query(query.features));
}

}  // namespace rankex
