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

#include <rankex/synthetic.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

namespace rankex {

GeneratorKind parse_generator_kind(const std::string& text) {
  if (text == "linear") return GeneratorKind::kLinear;
  if (text == "interaction") return GeneratorKind::kInteraction;
  if (text == "duplicated-columns") return GeneratorKind::kDuplicatedColumns;
  throw Error("unknown generator '" + text + "' (expected linear|interaction|duplicated-columns)");
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kLinear: return "linear";
    case GeneratorKind::kInteraction: return "interaction";
    case GeneratorKind::kDuplicatedColumns: return "duplicated-columns";
  }
  return "unknown";
}

SyntheticSuite generate_synthetic(const SyntheticSpec& spec) {
  const Index m = spec.feature_count;
  if (m < 1) throw Error("synthetic: feature count must be positive");
  if (spec.n_queries < 1 || spec.docs_per_query < 1) throw Error("synthetic: empty suite");
  if (spec.planted.empty()) throw Error("synthetic: planted feature set is empty");
  if (std::set<FeatureId>(spec.planted.begin(), spec.planted.end()).size() != spec.planted.size()) {
    throw Error("synthetic: planted features must be distinct");
  }
  for (FeatureId f : spec.planted) {
    if (f < 0 || f >= m) throw Error("synthetic: planted feature " + std::to_string(f) + " out of range");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SyntheticSuite suite;
  VecX weights = VecX::Zero(m);
  for (FeatureId f : spec.planted) weights(f) = 1.0 + 2.0 * unit(rng);

  std::vector<PlantedRanker::Interaction> interactions;
  if (spec.kind == GeneratorKind::kInteraction && spec.planted.size() >= 2) {
    interactions.push_back({spec.planted[0], spec.planted[1], 4.0});
  }
  if (spec.kind == GeneratorKind::kDuplicatedColumns) {
    FeatureId dup = 0;
    while (dup < m && std::find(spec.planted.begin(), spec.planted.end(), dup) != spec.planted.end()) ++dup;
    if (dup >= m) throw Error("synthetic: no free column for the duplicate");
    suite.duplicate_of_first = dup;
    const FeatureId a = spec.planted[0];
    weights(a) *= 0.5;
    weights(dup) = weights(a);
  }
  suite.model = std::make_shared<PlantedRanker>(weights, interactions);

  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<QueryGroup> queries;
  queries.reserve(static_cast<std::size_t>(spec.n_queries));
  for (int qi = 0; qi < spec.n_queries; ++qi) {
    QueryGroup q;
    q.qid = spec.qid_prefix + std::to_string(qi + 1);
    const Index n = spec.docs_per_query;
    q.features.resize(n, m);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < m; ++j) q.features(i, j) = unit(rng);
    }
    if (suite.duplicate_of_first >= 0) q.features.col(suite.duplicate_of_first) = q.features.col(spec.planted[0]);

    VecX target = suite.model->score_query(q.features);
    if (spec.noise > 0) {
      for (Index i = 0; i < n; ++i) target(i) += spec.noise * noise(rng);
    }
    std::vector<Index> ascending(static_cast<std::size_t>(n));
    std::iota(ascending.begin(), ascending.end(), Index{0});
    std::stable_sort(ascending.begin(), ascending.end(),
                     [&](Index a, Index b) { return target(a) < target(b); });
    q.labels.resize(n);
    for (Index p = 0; p < n; ++p) q.labels(ascending[static_cast<std::size_t>(p)]) = static_cast<int>(3 * p / n);
    q.comments.assign(static_cast<std::size_t>(n), std::string());
    queries.push_back(std::move(q));
  }
  suite.dataset = make_dataset(std::move(queries));
  return suite;
}

}  // namespace rankex
