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

#include <rankex/harness.hpp>

#include <rankex/metrics.hpp>

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

namespace rankex {

using nlohmann::json;

SignTest sign_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("sign_test: samples are not paired");
  SignTest t;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) {
      ++t.wins;
    } else if (a[i] < b[i]) {
      ++t.losses;
    } else {
      ++t.ties;
    }
  }
  const std::size_t n = t.wins + t.losses;
  if (n == 0) return t;
  const std::size_t tail = std::min(t.wins, t.losses);
  // P(X <= tail) for X ~ Binomial(n, 1/2), summed in log space.
  long double cdf = 0.0L;
  for (std::size_t i = 0; i <= tail; ++i) {
    const long double log_term = std::lgamma(static_cast<long double>(n) + 1) -
                                 std::lgamma(static_cast<long double>(i) + 1) -
                                 std::lgamma(static_cast<long double>(n - i) + 1) -
                                 static_cast<long double>(n) * std::log(2.0L);
    cdf += std::exp(log_term);
  }
  t.p_value = static_cast<double>(std::min(1.0L, 2.0L * cdf));
  return t;
}

std::uint64_t query_seed(std::uint64_t global_seed, const std::string& qid) {
  return mix_seed(global_seed ^ mix_seed(hash_string(qid)));
}

Explanation explain_query(const Ranker& model, const QueryGroup& query, Method method,
                          const ExperimentConfig& config, const MatX& background,
                          std::uint64_t seed) {
  const Index m = model.feature_count();
  ExplainConfig ec = config.explain;
  ec.seed = seed;
  if (ec.mask_policy.fill.size() == 0) ec.mask_policy = MaskPolicy::zero(m);
  const int k_clamped = static_cast<int>(std::min<Index>(ec.k, m));

  Explanation ex;
  switch (method) {
    case Method::kRandom:
      ex = random_explanation(m, k_clamped, seed);
      break;
    case Method::kShap1:
    case Method::kShap5: {
      ShapConfig sc = config.shap;
      sc.seed = seed;
      ex = shap_topk(model, query, ec.k, method == Method::kShap1 ? ShapVariant::kTop1 : ShapVariant::kTop5,
                     background, sc, config.shap_rank_by);
      break;
    }
    case Method::kGreedy:
      ec.epsilon = Epsilon::none();
      ex = explain_with_seeds(model, query, ec);
      break;
    case Method::kGreedyCover:
      ec.epsilon = Epsilon::zero();
      ex = explain_with_seeds(model, query, ec);
      break;
    case Method::kGreedyCoverEps:
      if (ec.epsilon.mode == EpsilonMode::kNone) ec.epsilon = Epsilon::mean();
      ex = explain_with_seeds(model, query, ec);
      break;
  }
  ex.k_requested = ec.k;
  const Ranking original = rank(model, query);
  const auto score = score_explanation(model, query, original, ex.mask(m), ec.mask_policy);
  ex.validity = score.validity;
  ex.completeness = score.completeness;
  return ex;
}

ExperimentResult run_experiment(const Ranker& model, const Dataset& test,
                                const ExperimentConfig& config, const Dataset* background_source) {
  if (config.methods.empty()) throw Error("no methods requested");
  const Dataset selected = split_queries(test, config.queries);

  std::vector<const QueryGroup*> queries;
  ExperimentResult result;
  result.k = config.explain.k;
  for (const auto& q : selected.queries) {
    if (q.size() < 2) {
      ++result.skipped_queries;
    } else {
      queries.push_back(&q);
    }
  }

  MatX background;
  const bool needs_background = std::any_of(config.methods.begin(), config.methods.end(), [](Method m) {
    return m == Method::kShap1 || m == Method::kShap5;
  });
  if (needs_background) {
    const Dataset& source = background_source != nullptr ? *background_source : selected;
    background = sample_rows(source, static_cast<std::size_t>(config.shap.background_size),
                             mix_seed(config.seed ^ 0x5348415042ULL));
  }

  const std::size_t n_methods = config.methods.size();
  const std::size_t n_jobs = queries.size() * n_methods;
  result.reports.resize(n_jobs);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::string failed_qid;
  auto worker = [&] {
    while (true) {
      const std::size_t job = next.fetch_add(1);
      if (job >= n_jobs) return;
      const QueryGroup& q = *queries[job / n_methods];
      const Method method = config.methods[job % n_methods];
      try {
        const auto start = std::chrono::steady_clock::now();
        const Explanation ex = explain_query(model, q, method, config, background, query_seed(config.seed, q.qid));
        const auto stop = std::chrono::steady_clock::now();
        QueryReport& report = result.reports[job];
        report.qid = q.qid;
        report.method = method;
        for (FeatureId f : ex.selected) report.selected.push_back(f + 1);
        report.validity = ex.validity;
        report.completeness = ex.completeness;
        report.size = ex.selected.size();
        if (config.record_timings) {
          report.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) {
          first_error = std::current_exception();
          failed_qid = q.qid;
        }
        next.store(n_jobs);
        return;
      }
    }
  };
  const int n_threads = std::max(1, config.threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const std::exception& e) {
      throw Error("query " + failed_qid + ": " + e.what());
    }
  }

  std::vector<std::vector<double>> per_method(n_methods);
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    MethodAggregate agg;
    agg.method = config.methods[mi];
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
      const auto& r = result.reports[qi * n_methods + mi];
      agg.mean_validity += r.validity;
      agg.mean_completeness += r.completeness;
      per_method[mi].push_back(r.validity);
    }
    agg.queries = queries.size();
    if (agg.queries > 0) {
      agg.mean_validity /= static_cast<double>(agg.queries);
      agg.mean_completeness /= static_cast<double>(agg.queries);
    }
    result.aggregates.push_back(agg);
  }
  for (std::size_t a = 0; a < n_methods; ++a) {
    for (std::size_t b = a + 1; b < n_methods; ++b) {
      result.comparisons.push_back(
          {config.methods[a], config.methods[b], sign_test(per_method[a], per_method[b])});
    }
  }
  return result;
}

void write_report(std::ostream& out, const ExperimentResult& result) {
  for (const auto& r : result.reports) {
    json line = {{"schema", kReportSchema},
                 {"type", "query"},
                 {"qid", r.qid},
                 {"method", to_string(r.method)},
                 {"selected", r.selected},
                 {"validity", r.validity},
                 {"completeness", r.completeness},
                 {"size", r.size}};
    if (r.wall_ms) line["wall_ms"] = *r.wall_ms;
    out << line.dump() << '\n';
  }
  json methods = json::array();
  for (const auto& a : result.aggregates) {
    methods.push_back({{"method", to_string(a.method)},
                       {"mean_validity", a.mean_validity},
                       {"mean_completeness", a.mean_completeness},
                       {"queries", a.queries}});
  }
  json tests = json::array();
  for (const auto& c : result.comparisons) {
    tests.push_back({{"a", to_string(c.a)},
                     {"b", to_string(c.b)},
                     {"wins", c.validity.wins},
                     {"losses", c.validity.losses},
                     {"ties", c.validity.ties},
                     {"p_value", c.validity.p_value}});
  }
  json aggregate = {{"schema", kReportSchema},
                    {"type", "aggregate"},
                    {"k", result.k},
                    {"skipped_queries", result.skipped_queries},
                    {"methods", methods},
                    {"sign_tests", tests}};
  out << aggregate.dump() << '\n';
}

ParsedReport read_report(std::istream& in) {
  ParsedReport parsed;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j.at("schema").get<int>() != kReportSchema) throw Error("unsupported report schema");
    const auto type = j.at("type").get<std::string>();
    if (type == "query") {
      QueryReport r;
      r.qid = j.at("qid").get<std::string>();
      r.method = parse_method(j.at("method").get<std::string>());
      r.selected = j.at("selected").get<std::vector<int>>();
      r.validity = j.at("validity").get<double>();
      r.completeness = j.at("completeness").get<double>();
      r.size = j.at("size").get<std::size_t>();
      if (j.contains("wall_ms")) r.wall_ms = j.at("wall_ms").get<double>();
      parsed.reports.push_back(std::move(r));
    } else if (type == "aggregate") {
      parsed.skipped_queries = j.at("skipped_queries").get<std::size_t>();
      for (const auto& m : j.at("methods")) {
        parsed.aggregates.push_back({parse_method(m.at("method").get<std::string>()),
                                     m.at("mean_validity").get<double>(),
                                     m.at("mean_completeness").get<double>(),
                                     m.at("queries").get<std::size_t>()});
      }
    } else {
      throw Error("unknown report record type '" + type + "'");
    }
  }
  return parsed;
}

std::vector<KRow> effect_of_k(const Ranker& model, const Dataset& test, const ExperimentConfig& config,
                              const std::vector<int>& k_values, const Dataset* background_source) {
  if (k_values.empty()) throw Error("effect_of_k: no k values");
  if (!std::is_sorted(k_values.begin(), k_values.end())) throw Error("effect_of_k: k values must be ascending");
  std::vector<KRow> rows;
  for (int k : k_values) {
    ExperimentConfig c = config;
    c.explain.k = k;
    const auto result = run_experiment(model, test, c, background_source);
    for (const auto& a : result.aggregates) {
      rows.push_back({a.method, k, a.mean_validity, a.mean_completeness, a.queries});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const KRow& a, const KRow& b) {
    return static_cast<int>(a.method) < static_cast<int>(b.method);
  });
  return rows;
}

void write_k_table(std::ostream& out, const std::vector<KRow>& rows) {
  out << "method\tk\tmean_validity\tmean_completeness\tqueries\n";
  for (const auto& r : rows) {
    out << to_string(r.method) << '\t' << r.k << '\t' << json(r.mean_validity).dump() << '\t'
        << json(r.mean_completeness).dump() << '\t' << r.queries << '\n';
  }
}

double sanity_ndcg(const Ranker& model, const Dataset& test) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& q : test.queries) {
    if (q.labels.maxCoeff() <= 0) continue;
    total += ndcg_at(10, rank(model, q), q.labels);
    ++n;
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

ModelSpec parse_model_spec(const std::string& text) {
  ModelSpec spec;
  if (text == "linear") {
    spec.kind = RankerKind::kPointwiseLinear;
  } else if (text == "pairwise") {
    spec.kind = RankerKind::kPairwiseLogistic;
  } else if (text == "gbdt") {
    spec.kind = RankerKind::kTreeEnsemble;
  } else if (text.rfind("external:", 0) == 0 && text.size() > 9) {
    spec.kind = RankerKind::kExternal;
    spec.external_command = text.substr(9);
  } else {
    throw Error("unknown model '" + text + "' (expected linear|pairwise|gbdt|external:CMD)");
  }
  return spec;
}

RankerPtr build_model(const ModelSpec& spec, const Dataset* train, Index feature_count) {
  if (spec.kind == RankerKind::kExternal) return external_scorer(spec.external_command, feature_count);
  if (train == nullptr) throw Error("training data required for model '" + to_string(spec.kind) + "'");
  switch (spec.kind) {
    case RankerKind::kPointwiseLinear: return train_pointwise_linear(*train, spec.linear);
    case RankerKind::kPairwiseLogistic: return train_pairwise_logistic(*train, spec.pairwise);
    case RankerKind::kTreeEnsemble: return train_tree_ensemble(*train, spec.trees);
    default: break;
  }
  throw Error("cannot train model kind '" + to_string(spec.kind) + "'");
}

}  // namespace rankex
