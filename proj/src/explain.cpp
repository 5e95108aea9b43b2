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

#include <rankex/explain.hpp>

#include <algorithm>
#include <charconv>
#include <numeric>
#include <random>

namespace rankex {

std::size_t PairSet::uncovered_count() const {
  return static_cast<std::size_t>(std::count(covered.begin(), covered.end(), false));
}

std::string to_string(Method method) {
  switch (method) {
    case Method::kRandom: return "random";
    case Method::kShap1: return "shap1";
    case Method::kShap5: return "shap5";
    case Method::kGreedy: return "greedy";
    case Method::kGreedyCover: return "greedy-cover";
    case Method::kGreedyCoverEps: return "greedy-cover-eps";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  for (auto m : {Method::kRandom, Method::kShap1, Method::kShap5, Method::kGreedy,
                 Method::kGreedyCover, Method::kGreedyCoverEps}) {
    if (text == to_string(m)) return m;
  }
  throw Error("unknown method '" + text +
              "' (expected random|shap1|shap5|greedy|greedy-cover|greedy-cover-eps)");
}

bool is_greedy(Method method) {
  return method == Method::kGreedy || method == Method::kGreedyCover ||
         method == Method::kGreedyCoverEps;
}

Epsilon parse_epsilon(const std::string& text) {
  if (text == "zero") return Epsilon::zero();
  if (text == "mean") return Epsilon::mean();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("bad epsilon '" + text + "' (expected zero|mean|<number>)");
  }
  return Epsilon::fixed(v);
}

FeatureMask Explanation::mask(Index feature_count) const {
  return FeatureMask(feature_count, selected);
}

PairSet sample_pairs(const Ranking& original, std::size_t sample_size, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(original.size());
  if (n < 2) throw Error("sample_pairs: need at least 2 documents");
  const std::size_t total = n * (n - 1) / 2;

  PairSet set;
  auto emit = [&](std::size_t a, std::size_t b) {
    set.pairs.push_back({original.order[a], original.order[b], static_cast<double>(b - a)});
  };
  if (total <= sample_size) {
    set.pairs.reserve(total);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) emit(a, b);
    }
  } else {
    std::mt19937_64 rng(seed);
    const auto picked = sample_indices(total, sample_size, rng);
    // picked is ascending; walk the rows of the upper triangle once.
    std::size_t a = 0;
    std::size_t row_start = 0;
    for (std::size_t id : picked) {
      while (id >= row_start + (n - 1 - a)) {
        row_start += n - 1 - a;
        ++a;
      }
      emit(a, a + 1 + (id - row_start));
    }
  }
  set.covered.assign(set.pairs.size(), false);
  return set;
}

namespace {

void check_candidate(const FeatureMask& selected, FeatureId f) {
  if (f < 0 || f >= selected.universe_size()) throw Error("feature id out of range");
  if (selected.contains(f)) throw Error("feature " + std::to_string(f) + " is already selected");
}

}  // namespace

double propensity(const Ranker& model, const QueryGroup& query, const FeatureMask& selected,
                  FeatureId f, const ConcordantPair& pair, const MaskPolicy& policy) {
  check_candidate(selected, f);
  const VecX s = masked_query_scores(model, query, selected.with(f), policy);
  return (s(pair.upper) - s(pair.lower)) * pair.weight;
}

double utility(const Ranker& model, const QueryGroup& query, const FeatureMask& selected,
               FeatureId f, const PairSet& pairs, const MaskPolicy& policy) {
  check_candidate(selected, f);
  const VecX s = masked_query_scores(model, query, selected.with(f), policy);
  double u = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (pairs.covered[p]) continue;
    const auto& pair = pairs.pairs[p];
    u += (s(pair.upper) - s(pair.lower)) * pair.weight;
  }
  return u;
}

double epsilon_threshold(std::span<const double> row, const Epsilon& epsilon) {
  switch (epsilon.mode) {
    case EpsilonMode::kZero: return 0.0;
    case EpsilonMode::kFixed: return epsilon.value;
    case EpsilonMode::kMean: {
      double sum = 0.0;
      std::size_t n = 0;
      for (double z : row) {
        if (z > 0.0) {
          sum += z;
          ++n;
        }
      }
      return n == 0 ? 0.0 : sum / static_cast<double>(n);
    }
    case EpsilonMode::kNone: break;
  }
  throw Error("epsilon_threshold: greedy without coverage has no threshold");
}

PreferenceMatrix preference_matrix(const Ranker& model, const QueryGroup& query,
                                   const FeatureMask& selected, const PairSet& pairs,
                                   const MaskPolicy& policy) {
  PreferenceMatrix pm;
  for (FeatureId f = 0; f < static_cast<FeatureId>(selected.universe_size()); ++f) {
    if (!selected.contains(f)) pm.features.push_back(f);
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (!pairs.covered[p]) pm.pair_ids.push_back(p);
  }
  pm.cells.resize(static_cast<Index>(pm.features.size()), static_cast<Index>(pm.pair_ids.size()));
  if (pm.features.empty()) return pm;

  const MatX base = apply_mask(query.features, selected, policy);
  MatX docs = base;
  for (std::size_t r = 0; r < pm.features.size(); ++r) {
    const FeatureId f = pm.features[r];
    docs.col(f) = query.features.col(f);
    const VecX s = model.score_query(docs);
    docs.col(f) = base.col(f);
    for (std::size_t c = 0; c < pm.pair_ids.size(); ++c) {
      const auto& pair = pairs.pairs[pm.pair_ids[c]];
      pm.cells(static_cast<Index>(r), static_cast<Index>(c)) = (s(pair.upper) - s(pair.lower)) * pair.weight;
    }
  }
  return pm;
}

namespace {

Method method_for(const Epsilon& epsilon) {
  switch (epsilon.mode) {
    case EpsilonMode::kNone: return Method::kGreedy;
    case EpsilonMode::kZero: return Method::kGreedyCover;
    case EpsilonMode::kMean:
    case EpsilonMode::kFixed: return Method::kGreedyCoverEps;
  }
  return Method::kGreedy;
}

void check_inputs(const Ranker& model, const QueryGroup& query, const ExplainConfig& config) {
  if (config.k < 1) throw Error("k must be >= 1");
  if (config.pair_sample_size < 1) throw Error("pair sample size must be >= 1");
  if (query.size() < 2) throw Error("query " + query.qid + " has fewer than 2 documents");
  if (query.feature_count() != model.feature_count()) {
    throw Error("query " + query.qid + " has " + std::to_string(query.feature_count()) +
                " features, model expects " + std::to_string(model.feature_count()));
  }
  if (config.mask_policy.fill.size() != model.feature_count()) {
    throw Error("mask policy dimension does not match the model");
  }
}

}  // namespace

Explanation explain_run(const Ranker& model, const QueryGroup& query, const Ranking& original,
                        const PairSet& sampled, const ExplainConfig& config,
                        std::optional<FeatureId> forced_first) {
  const Index m = model.feature_count();
  const bool cover = config.epsilon.mode != EpsilonMode::kNone;
  PairSet pairs = sampled;
  FeatureMask selected(m);

  Explanation ex;
  ex.method = method_for(config.epsilon);
  ex.k_requested = config.k;
  double previous_utility = 0.0;

  for (int step = 0; step < config.k; ++step) {
    if (cover && pairs.uncovered_count() == 0) break;
    const PreferenceMatrix pm = preference_matrix(model, query, selected, pairs, config.mask_policy);
    if (pm.features.empty()) break;
    const VecX utilities = pm.utilities();

    Index row = 0;
    if (step == 0 && forced_first) {
      auto it = std::find(pm.features.begin(), pm.features.end(), *forced_first);
      if (it == pm.features.end()) throw Error("forced seed feature out of range");
      row = static_cast<Index>(it - pm.features.begin());
    } else {
      // First maximum, i.e. lowest feature id on ties.
      for (Index r = 1; r < utilities.size(); ++r) {
        if (utilities(r) > utilities(row)) row = r;
      }
    }
    const double u = utilities(row);
    if (!cover && step > 0 && !(u > previous_utility)) break;

    if (cover) {
      const VecX cells = pm.cells.row(row).transpose();
      const double eps = epsilon_threshold(std::span<const double>(cells.data(), static_cast<std::size_t>(cells.size())),
                                           config.epsilon);
      for (std::size_t c = 0; c < pm.pair_ids.size(); ++c) {
        if (cells(static_cast<Index>(c)) > eps) pairs.covered[pm.pair_ids[c]] = true;
      }
      ex.uncovered_after_step.push_back(pairs.uncovered_count());
    }
    const FeatureId f = pm.features[static_cast<std::size_t>(row)];
    selected.insert(f);
    ex.selected.push_back(f);
    ex.step_utilities.push_back(u);
    previous_utility = u;
  }

  const auto score = score_explanation(model, query, original, selected, config.mask_policy);
  ex.validity = score.validity;
  ex.completeness = score.completeness;
  return ex;
}

Explanation explain_greedy(const Ranker& model, const QueryGroup& query, const ExplainConfig& config) {
  if (config.epsilon.mode != EpsilonMode::kNone) throw Error("explain_greedy requires epsilon mode none");
  check_inputs(model, query, config);
  const Ranking original = rank(model, query);
  const PairSet pairs = sample_pairs(original, config.pair_sample_size, config.seed);
  return explain_run(model, query, original, pairs, config, std::nullopt);
}

Explanation explain_greedy_cover(const Ranker& model, const QueryGroup& query,
                                 const ExplainConfig& config) {
  if (config.epsilon.mode == EpsilonMode::kNone) {
    throw Error("explain_greedy_cover requires epsilon mode zero, mean or fixed");
  }
  check_inputs(model, query, config);
  const Ranking original = rank(model, query);
  const PairSet pairs = sample_pairs(original, config.pair_sample_size, config.seed);
  return explain_run(model, query, original, pairs, config, std::nullopt);
}

Explanation explain_with_seeds(const Ranker& model, const QueryGroup& query,
                               const ExplainConfig& config) {
  if (config.n_seeds < 1) throw Error("n_seeds must be >= 1");
  check_inputs(model, query, config);
  const Ranking original = rank(model, query);
  const PairSet pairs = sample_pairs(original, config.pair_sample_size, config.seed);

  // With F' empty every pair is uncovered, so one matrix serves all seeds.
  const PreferenceMatrix first =
      preference_matrix(model, query, FeatureMask(model.feature_count()), pairs, config.mask_policy);
  const VecX utilities = first.utilities();
  std::vector<Index> rows;
  for (Index r = 0; r < utilities.size(); ++r) {
    if (utilities(r) > 0.0) rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [&](Index a, Index b) { return utilities(a) > utilities(b); });
  if (rows.size() > static_cast<std::size_t>(config.n_seeds)) rows.resize(static_cast<std::size_t>(config.n_seeds));

  if (rows.empty()) return explain_run(model, query, original, pairs, config, std::nullopt);

  std::optional<Explanation> best;
  for (Index r : rows) {
    Explanation run = explain_run(model, query, original, pairs, config,
                                  first.features[static_cast<std::size_t>(r)]);
    if (!best || run.validity > best->validity ||
        (run.validity == best->validity && run.selected.size() < best->selected.size())) {
      best = std::move(run);
    }
  }
  return *best;
}

}  // namespace rankex
