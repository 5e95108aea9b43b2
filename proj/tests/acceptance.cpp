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

// Acceptance checks: one PASS/FAIL/SKIP line per criterion.

#include <rankex/harness.hpp>
#include <rankex/oracle.hpp>
#include <rankex/synthetic.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

namespace {

using namespace rankex;
using Clock = std::chrono::steady_clock;

enum class Outcome { kPass, kFail, kSkip };

struct Verdict {
  Outcome outcome;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& check) {
  const auto start = Clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {Outcome::kFail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const char* tag = v.outcome == Outcome::kPass ? "PASS" : v.outcome == Outcome::kFail ? "FAIL" : "SKIP";
  if (v.outcome == Outcome::kFail) ++failures;
  std::printf("[%s] %2d %-34s %s (%.2fs)\n", tag, id, name.c_str(), v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict verdict(bool ok, std::string detail) { return {ok ? Outcome::kPass : Outcome::kFail, std::move(detail)}; }

double elapsed(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

SyntheticSuite planted_suite(GeneratorKind kind, std::vector<FeatureId> planted, Index m, int queries,
                             std::uint64_t seed, Index docs = 20, double noise = 0.0) {
  SyntheticSpec spec;
  spec.n_queries = queries;
  spec.docs_per_query = docs;
  spec.feature_count = m;
  spec.planted = std::move(planted);
  spec.kind = kind;
  spec.noise = noise;
  spec.seed = seed;
  spec.qid_prefix = to_string(kind) + "-";
  return generate_synthetic(spec);
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// 1. kendall_tau against an O(n^2) pair counter.
Verdict metric_correctness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> size(2, 8);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<Index> a(static_cast<std::size_t>(size(rng)));
    std::iota(a.begin(), a.end(), Index{0});
    auto b = a;
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    if (kendall_tau(Ranking::from_order(a), Ranking::from_order(b)) != testing::brute_force_tau(a, b)) ++mismatches;
  }
  const double secs = elapsed(start);
  return verdict(mismatches == 0 && secs < 1.0,
                 fmt("1000 pairs n<=8, %d mismatches (exact), %.3fs < 1s", mismatches, secs));
}

// 2. Full mask gives V = 1, empty mask gives C = -1, for every in-repo model.
Verdict trivial_bounds() {
  const auto train = planted_suite(GeneratorKind::kInteraction, {1, 4, 6}, 10, 30, 11);
  const auto test = planted_suite(GeneratorKind::kLinear, {0, 2}, 10, 20, 12);
  TreeTrainOptions trees;
  trees.n_trees = 30;
  const std::vector<RankerPtr> models = {train_pointwise_linear(train.dataset), train_pairwise_logistic(train.dataset),
                                         train_tree_ensemble(train.dataset, trees)};
  int checked = 0, bad = 0;
  for (const auto& model : models) {
    const auto policy = MaskPolicy::zero(10);
    for (const auto& q : test.dataset.queries) {
      if (validity(*model, q, FeatureMask::full(10), policy) != 1.0) ++bad;
      if (completeness(*model, q, FeatureMask::none(10), policy) != -1.0) ++bad;
      checked += 2;
    }
  }
  return verdict(bad == 0, fmt("linear/pairwise/gbdt x 20 queries, %d of %d checks off (exact)", bad, checked));
}

// 3. Greedy-cover recovers planted features, confirmed optimal by brute force.
Verdict planted_recovery() {
  const auto start = Clock::now();
  const std::vector<FeatureId> planted = {2, 5, 7};
  const auto s = planted_suite(GeneratorKind::kLinear, planted, 10, 50, 3);
  ExperimentConfig cfg;
  cfg.methods = {Method::kGreedyCover};
  cfg.explain.k = 3;
  cfg.seed = 1;
  const auto result = run_experiment(*s.model, s.dataset, cfg);
  int recovered = 0, oracle_perfect = 0;
  for (const auto& r : result.reports) {
    std::set<int> got(r.selected.begin(), r.selected.end());
    if (got == std::set<int>{3, 6, 8}) ++recovered;
  }
  for (const auto& q : s.dataset.queries) {
    const auto o = brute_force_optimal(*s.model, q, 3, MaskPolicy::zero(10));
    if (o.best_validity == 1.0) ++oracle_perfect;
  }
  const double mean_v = result.aggregates[0].mean_validity;
  const double secs = elapsed(start);
  return verdict(recovered == 50 && mean_v == 1.0 && oracle_perfect == 50 && secs < 30.0,
                 fmt("S* recovered %d/50, mean V %.6f (==1), oracle 1.0 on %d/50, %.1fs < 30s", recovered, mean_v,
                     oracle_perfect, secs));
}

// 4. Oracle gap on tree-ensemble instances.
Verdict oracle_gap() {
  std::vector<double> gce, oracle;
  int dominance_violations = 0;
  const std::vector<Method> methods = {Method::kRandom, Method::kShap1, Method::kShap5,
                                       Method::kGreedy, Method::kGreedyCover, Method::kGreedyCoverEps};
  for (int i = 0; i < 20; ++i) {
    const Index m = 8 + i % 5;
    const int k = 1 + i % 3;
    const std::vector<FeatureId> planted = {0, 3, static_cast<FeatureId>(m - 1)};
    const auto train = planted_suite(GeneratorKind::kInteraction, planted, m, 20, 100 + i, 20, 0.3);
    TreeTrainOptions opts;
    opts.n_trees = 40;
    opts.max_depth = 3;
    opts.seed = static_cast<std::uint64_t>(i) + 1;
    const auto model = train_tree_ensemble(train.dataset, opts);
    const auto test = planted_suite(GeneratorKind::kInteraction, planted, m, 1, 500 + i, 15, 0.3);
    const auto& q = test.dataset.queries[0];

    ExperimentConfig cfg;
    cfg.methods = methods;
    cfg.explain.k = k;
    cfg.shap.background_size = 100;
    cfg.seed = static_cast<std::uint64_t>(i);
    const auto result = run_experiment(*model, test.dataset, cfg, &train.dataset);
    const auto best = brute_force_optimal(*model, q, k, MaskPolicy::zero(m));
    for (const auto& r : result.reports) {
      if (r.validity > best.best_validity) ++dominance_violations;
      if (r.method == Method::kGreedyCoverEps) gce.push_back(r.validity);
    }
    oracle.push_back(best.best_validity);
  }
  const double ratio = mean_of(gce) / mean_of(oracle);
  return verdict(ratio >= 0.8 && dominance_violations == 0,
                 fmt("mean V greedy-cover-eps %.3f vs oracle %.3f, ratio %.3f >= 0.8; dominance violations %d",
                     mean_of(gce), mean_of(oracle), ratio, dominance_violations));
}

// 5. Greedy variants beat random; coverage with epsilon beats plain greedy on duplicates.
Verdict method_ordering() {
  const std::vector<Method> methods = {Method::kRandom, Method::kGreedy, Method::kGreedyCover,
                                       Method::kGreedyCoverEps};
  std::vector<std::vector<double>> pooled(methods.size());
  double dup_greedy = 0.0, dup_eps = 0.0;
  for (auto kind : {GeneratorKind::kLinear, GeneratorKind::kInteraction, GeneratorKind::kDuplicatedColumns}) {
    const auto s = planted_suite(kind, {1, 4, 6, 9}, 12, 20, 77, 20, 0.1);
    ExperimentConfig cfg;
    cfg.methods = methods;
    cfg.explain.k = 3;
    cfg.seed = 5;
    const auto result = run_experiment(*s.model, s.dataset, cfg);
    for (const auto& r : result.reports) {
      const auto mi = static_cast<std::size_t>(std::find(methods.begin(), methods.end(), r.method) - methods.begin());
      pooled[mi].push_back(r.validity);
    }
    if (kind == GeneratorKind::kDuplicatedColumns) {
      dup_greedy = result.aggregates[1].mean_validity;
      dup_eps = result.aggregates[3].mean_validity;
    }
  }
  bool ok = dup_eps >= dup_greedy;
  std::string detail = fmt("%zu queries; random %.3f", pooled[0].size(), mean_of(pooled[0]));
  for (std::size_t mi = 1; mi < methods.size(); ++mi) {
    const auto t = sign_test(pooled[mi], pooled[0]);
    const bool better = mean_of(pooled[mi]) > mean_of(pooled[0]) && t.wins > t.losses && t.p_value < 0.05;
    ok = ok && better;
    detail += fmt("; %s %.3f (p=%.2g)", to_string(methods[mi]).c_str(), mean_of(pooled[mi]), t.p_value);
  }
  detail += fmt("; duplicates: eps %.3f >= greedy %.3f", dup_eps, dup_greedy);
  return verdict(ok && pooled[0].size() >= 50, detail);
}

// 6. Kernel SHAP against exact Shapley enumeration.
Verdict shap_fidelity() {
  const auto start = Clock::now();
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_matrix = [&](Index r, Index c) {
    MatX x(r, c);
    for (Index i = 0; i < r; ++i) {
      for (Index j = 0; j < c; ++j) x(i, j) = unit(rng);
    }
    return x;
  };
  auto max_error = [](const ShapAttribution& a, const std::vector<double>& exact) {
    double e = 0.0;
    for (Index j = 0; j < a.phi.size(); ++j) e = std::max(e, std::abs(a.phi(j) - exact[static_cast<std::size_t>(j)]));
    return e;
  };
  auto rows_of = [](const MatX& b) {
    std::vector<std::vector<double>> rows;
    for (Index i = 0; i < b.rows(); ++i) rows.push_back(testing::to_std(b.row(i).transpose()));
    return rows;
  };
  ShapConfig exhaustive;
  exhaustive.exhaustive = true;
  double worst_exhaustive = 0.0;
  for (Index m : {2, 4, 6, 8, 10}) {
    const VecX w = random_matrix(1, m).row(0).transpose() * 2.0 - VecX::Ones(m);
    const LinearRanker linear(w, 0.3);
    const auto train = planted_suite(GeneratorKind::kInteraction, {0, static_cast<FeatureId>(m - 1)}, m, 10,
                                     static_cast<std::uint64_t>(m));
    TreeTrainOptions opts;
    opts.n_trees = 25;
    opts.max_depth = 3;
    const auto tree = train_tree_ensemble(train.dataset, opts);
    const MatX bg = random_matrix(10, m);
    for (int t = 0; t < 3; ++t) {
      const VecX x = random_matrix(1, m).row(0).transpose();
      for (const Ranker* model : {static_cast<const Ranker*>(&linear), static_cast<const Ranker*>(tree.get())}) {
        const auto exact = testing::exact_shapley(*model, testing::to_std(x), rows_of(bg));
        worst_exhaustive = std::max(worst_exhaustive, max_error(kernel_shap(*model, x, bg, exhaustive), exact));
      }
    }
  }
  double worst_sampled = 0.0;
  for (int t = 0; t < 10; ++t) {
    const VecX w = random_matrix(1, 10).row(0).transpose() * 2.0 - VecX::Ones(10);
    const LinearRanker linear(w);
    const MatX bg = random_matrix(50, 10);
    const VecX x = random_matrix(1, 10).row(0).transpose();
    ShapConfig sampled;
    sampled.n_samples = 200;
    sampled.seed = static_cast<std::uint64_t>(t);
    const auto exact = testing::exact_shapley(linear, testing::to_std(x), rows_of(bg));
    worst_sampled = std::max(worst_sampled, max_error(kernel_shap(linear, x, bg, sampled), exact));
  }
  const double secs = elapsed(start);
  return verdict(worst_exhaustive <= 1e-6 && worst_sampled <= 0.05 && secs < 20.0,
                 fmt("exhaustive max err %.2e <= 1e-6 (linear+tree, M<=10); sampled max err %.2e <= 0.05; %.1fs < 20s",
                     worst_exhaustive, worst_sampled, secs));
}

// 7. Prefix consistency per seed feature and byte-identical reports.
Verdict prefix_determinism() {
  const auto s = planted_suite(GeneratorKind::kInteraction, {1, 3, 5, 7, 9}, 12, 20, 8, 20, 0.2);
  int runs = 0, broken = 0;
  for (auto eps : {Epsilon::none(), Epsilon::zero(), Epsilon::mean()}) {
    for (const auto& q : s.dataset.queries) {
      ExplainConfig c5;
      c5.k = 5;
      c5.epsilon = eps;
      c5.seed = query_seed(4, q.qid);
      c5.mask_policy = MaskPolicy::zero(12);
      ExplainConfig c10 = c5;
      c10.k = 10;
      const Ranking original = rank(*s.model, q);
      const PairSet pairs = sample_pairs(original, c5.pair_sample_size, c5.seed);
      for (FeatureId seed = 0; seed < 12; ++seed) {
        const auto a = explain_run(*s.model, q, original, pairs, c5, seed);
        const auto b = explain_run(*s.model, q, original, pairs, c10, seed);
        ++runs;
        if (a.selected.size() > b.selected.size() ||
            !std::equal(a.selected.begin(), a.selected.end(), b.selected.begin())) {
          ++broken;
        }
      }
    }
  }
  ExperimentConfig cfg;
  cfg.methods = {Method::kRandom, Method::kShap5, Method::kGreedy, Method::kGreedyCover, Method::kGreedyCoverEps};
  cfg.shap.background_size = 50;
  cfg.seed = 4;
  std::ostringstream first, second, threaded;
  write_report(first, run_experiment(*s.model, s.dataset, cfg));
  write_report(second, run_experiment(*s.model, s.dataset, cfg));
  cfg.threads = 3;
  write_report(threaded, run_experiment(*s.model, s.dataset, cfg));
  const bool identical = first.str() == second.str() && first.str() == threaded.str();
  return verdict(broken == 0 && identical,
                 fmt("k=5 prefix of k=10 in %d/%d seeded runs; reports byte-identical (repeat, 3 threads): %s",
                     runs - broken, runs, identical ? "yes" : "no"));
}

// 8. Mean validity of greedy-cover-eps does not drop as k grows.
Verdict effect_of_k_trend() {
  const auto s = planted_suite(GeneratorKind::kLinear, {2, 5, 7}, 10, 50, 3);
  ExperimentConfig cfg;
  cfg.methods = {Method::kGreedyCoverEps};
  cfg.seed = 1;
  const auto rows = effect_of_k(*s.model, s.dataset, cfg, {3, 5, 7, 10});
  bool ok = rows.size() == 4;
  std::string detail = "greedy-cover-eps mean V by k:";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    detail += fmt(" k=%d %.4f", rows[i].k, rows[i].mean_validity);
    if (i > 0 && rows[i].mean_validity < rows[i - 1].mean_validity) ok = false;
  }
  return verdict(ok, detail + " (non-decreasing)");
}

// 9. Directional check on MQ2008 fold 1 when the data is available.
Verdict mq2008_direction() {
  const char* dir = std::getenv("RANKEX_MQ2008_DIR");
  if (dir == nullptr) return {Outcome::kSkip, "set RANKEX_MQ2008_DIR to a directory with train.txt and test.txt"};
  namespace fs = std::filesystem;
  const fs::path root(dir);
  const auto start = Clock::now();
  Dataset train = load_letor((root / "train.txt").string());
  const Dataset test = load_letor((root / "test.txt").string(), train.feature_count);
  if (test.feature_count > train.feature_count) train = load_letor((root / "train.txt").string(), test.feature_count);
  const Index m = train.feature_count;

  LinearTrainOptions lin;
  lin.l2 = 1e-3;
  const std::vector<RankerPtr> models = {train_pointwise_linear(train, lin), train_pairwise_logistic(train),
                                         train_tree_ensemble(train)};
  const std::vector<Method> methods = {Method::kRandom, Method::kShap1, Method::kShap5,
                                       Method::kGreedy, Method::kGreedyCover, Method::kGreedyCoverEps};
  bool ok = true;
  std::string detail;
  for (const auto& model : models) {
    ExperimentConfig cfg;
    cfg.methods = methods;
    cfg.explain.k = 5;
    cfg.explain.pair_sample_size = 50;
    cfg.explain.mask_policy = MaskPolicy::zero(m);
    cfg.seed = 1;
    const auto result = run_experiment(*model, test, cfg, &train);
    const auto& random = result.aggregates[0];
    detail += fmt("%s: ndcg %.3f rand V %.3f", to_string(model->kind()).c_str(), sanity_ndcg(*model, test),
                  random.mean_validity);
    for (std::size_t mi = 1; mi < methods.size(); ++mi) {
      const auto& a = result.aggregates[mi];
      if (is_greedy(a.method) && !(a.mean_validity > random.mean_validity)) ok = false;
      if (!(a.mean_completeness > random.mean_completeness)) ok = false;
      detail += fmt(" %s V %.3f C %.3f", to_string(a.method).c_str(), a.mean_validity, a.mean_completeness);
    }
    detail += fmt(" (%zu queries, %zu skipped); ", result.aggregates[0].queries, result.skipped_queries);
  }
  const double secs = elapsed(start);
  return verdict(ok && secs < 600.0, detail + fmt("%.0fs < 600s", secs));
}

// 10. Duplicated predictive column: valid but not complete.
Verdict duplicate_witness() {
  const auto s = planted_suite(GeneratorKind::kDuplicatedColumns, {0}, 4, 20, 10);
  ExperimentConfig cfg;
  cfg.methods = {Method::kGreedyCover};
  cfg.seed = 2;
  const auto result = run_experiment(*s.model, s.dataset, cfg);
  int witnesses = 0;
  for (const auto& r : result.reports) {
    if (r.size == 1 && r.validity == 1.0 && r.completeness == -1.0) ++witnesses;
  }
  const auto& q = s.dataset.queries.front();
  const std::vector<FeatureId> original_column = {0};
  const FeatureMask mask(4, original_column);
  const double v = validity(*s.model, q, mask, MaskPolicy::zero(4));
  const double c = completeness(*s.model, q, mask, MaskPolicy::zero(4));
  return verdict(witnesses == 20 && v == 1.0 && c == -1.0,
                 fmt("greedy-cover keeps one copy on %d/20 queries with V=1, C=-1 exactly; mask {1}: V=%.1f C=%.1f",
                     witnesses, v, c));
}

}  // namespace

int main() {
  report(1, "metric correctness", metric_correctness);
  report(2, "trivial bounds", trivial_bounds);
  report(3, "planted recovery", planted_recovery);
  report(4, "oracle gap", oracle_gap);
  report(5, "method ordering", method_ordering);
  report(6, "kernel shap fidelity", shap_fidelity);
  report(7, "prefix and determinism", prefix_determinism);
  report(8, "effect of k", effect_of_k_trend);
  report(9, "dataset direction (MQ2008)", mq2008_direction);
  report(10, "valid-but-not-complete witness", duplicate_witness);
  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
