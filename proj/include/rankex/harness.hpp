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

#include <rankex/baselines.hpp>
#include <rankex/explain.hpp>
#include <rankex/letor.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rankex {

inline constexpr int kReportSchema = 1;

struct ExperimentConfig {
  std::vector<Method> methods = {Method::kGreedyCoverEps};
  ExplainConfig explain;
  ShapConfig shap;
  ShapRankBy shap_rank_by = ShapRankBy::kAbs;
  QuerySelector queries;
  std::uint64_t seed = 0;
  int threads = 1;
  // Wall-clock timing makes reports non-reproducible; off by default.
  bool record_timings = false;
};

struct QueryReport {
  std::string qid;
  Method method = Method::kGreedyCoverEps;
  std::vector<int> selected;  // 1-based LETOR feature ids
  double validity = 0.0;
  double completeness = 0.0;
  std::size_t size = 0;
  std::optional<double> wall_ms;
};

struct MethodAggregate {
  Method method = Method::kGreedyCoverEps;
  double mean_validity = 0.0;
  double mean_completeness = 0.0;
  std::size_t queries = 0;
};

struct SignTest {
  std::size_t wins = 0;
  std::size_t losses = 0;
  std::size_t ties = 0;
  double p_value = 1.0;  // two-sided
};

struct PairedComparison {
  Method a;
  Method b;
  SignTest validity;
};

struct ExperimentResult {
  std::vector<QueryReport> reports;  // canonical qid order, methods in config order
  std::vector<MethodAggregate> aggregates;
  std::vector<PairedComparison> comparisons;
  std::size_t skipped_queries = 0;
  int k = 0;
};

// Exact two-sided sign test on paired samples (ties dropped).
SignTest sign_test(std::span<const double> a, std::span<const double> b);

// Per-query seed derived from the global seed and qid.
std::uint64_t query_seed(std::uint64_t global_seed, const std::string& qid);

// Explains one query with one method.
Explanation explain_query(const Ranker& model, const QueryGroup& query, Method method,
                          const ExperimentConfig& config, const MatX& background,
                          std::uint64_t seed);

// `background_source` supplies SHAP background rows (usually the training
// split); when empty the test split is used.
ExperimentResult run_experiment(const Ranker& model, const Dataset& test,
                                const ExperimentConfig& config,
                                const Dataset* background_source = nullptr);

void write_report(std::ostream& out, const ExperimentResult& result);

struct ParsedReport {
  std::vector<QueryReport> reports;
  std::vector<MethodAggregate> aggregates;
  std::size_t skipped_queries = 0;
};

ParsedReport read_report(std::istream& in);

struct KRow {
  Method method;
  int k;
  double mean_validity;
  double mean_completeness;
  std::size_t queries;
};

// One experiment per (method, k); all share the configured seeds.
std::vector<KRow> effect_of_k(const Ranker& model, const Dataset& test,
                              const ExperimentConfig& config, const std::vector<int>& k_values,
                              const Dataset* background_source = nullptr);

void write_k_table(std::ostream& out, const std::vector<KRow>& rows);

// Mean NDCG@10 over queries with at least one positive label.
double sanity_ndcg(const Ranker& model, const Dataset& test);

// Model construction for the CLI.
struct ModelSpec {
  RankerKind kind = RankerKind::kPointwiseLinear;
  std::string external_command;
  LinearTrainOptions linear;
  PairwiseTrainOptions pairwise;
  TreeTrainOptions trees;
};

ModelSpec parse_model_spec(const std::string& text);
RankerPtr build_model(const ModelSpec& spec, const Dataset* train, Index feature_count);

}  // namespace rankex
