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
#include <rankex/oracle.hpp>
#include <rankex/synthetic.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using namespace rankex;
using json = nlohmann::json;

// Bad flags or values; exit code 1. Everything else exits with 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ModelFlags {
  std::string train;
  std::string model = "linear";
  std::string model_file;
  std::uint64_t seed = 1;
  double l2 = 1e-3;
  int epochs = 20;
  double learning_rate = -1.0;
  std::size_t train_pairs = 100;
  int trees = 100;
  int depth = 4;
  int min_leaf = 5;
  double subsample = 1.0;
};

struct RunFlags {
  std::string test;
  std::vector<std::string> methods = {"greedy-cover-eps"};
  int k = 5;
  std::size_t pairs = 50;
  std::string epsilon = "mean";
  std::string mask_policy = "zero";
  std::uint64_t seed = 0;
  int seeds = 3;
  std::string queries = "all";
  std::string out;
  int shap_samples = 200;
  int shap_background = 500;
  int shap_variant = 1;
  std::string shap_rank_by = "abs";
  int threads = 1;
  bool timings = false;
};

void add_model_flags(CLI::App* app, ModelFlags& f, bool with_file) {
  app->add_option("--train", f.train, "Training data (LETOR format, .gz allowed)")->check(CLI::ExistingFile);
  app->add_option("--model", f.model, "linear | pairwise | gbdt | external:CMD");
  if (with_file) app->add_option("--model-file", f.model_file, "Saved model (overrides --model)")->check(CLI::ExistingFile);
  app->add_option("--train-seed", f.seed, "Seed for model training");
  app->add_option("--l2", f.l2, "Ridge penalty (linear)");
  app->add_option("--epochs", f.epochs, "SGD epochs (pairwise)");
  app->add_option("--lr", f.learning_rate, "Learning rate (pairwise, gbdt)");
  app->add_option("--train-pairs", f.train_pairs, "Pairs per query per epoch (pairwise)");
  app->add_option("--trees", f.trees, "Boosting rounds (gbdt)");
  app->add_option("--depth", f.depth, "Tree depth (gbdt)");
  app->add_option("--min-leaf", f.min_leaf, "Minimum leaf size (gbdt)");
  app->add_option("--subsample", f.subsample, "Row subsample per tree (gbdt)");
}

void add_run_flags(CLI::App* app, RunFlags& f, bool with_methods) {
  app->add_option("--test", f.test, "Test data (LETOR format)")->required()->check(CLI::ExistingFile);
  if (with_methods) {
    app->add_option("--method", f.methods,
                    "random | shap | shap1 | shap5 | greedy | greedy-cover | greedy-cover-eps (repeatable)")
        ->delimiter(',');
  }
  app->add_option("--k", f.k, "Explanation size");
  app->add_option("--pairs", f.pairs, "Concordant pairs sampled per query");
  app->add_option("--epsilon", f.epsilon, "Coverage threshold for greedy-cover-eps: zero | mean | FLOAT");
  app->add_option("--mask-policy", f.mask_policy, "zero | mean");
  app->add_option("--seed", f.seed, "Global seed");
  app->add_option("--seeds", f.seeds, "Seed features tried per query");
  app->add_option("--queries", f.queries, "all | sample:N | qid,qid,...");
  app->add_option("--out", f.out, "Output path (default stdout)");
  app->add_option("--shap-samples", f.shap_samples, "Kernel SHAP coalition samples");
  app->add_option("--shap-background", f.shap_background, "Kernel SHAP background rows");
  app->add_option("--shap-variant", f.shap_variant, "Documents aggregated by --method shap: 1 | 5")
      ->check(CLI::IsMember({1, 5}));
  app->add_option("--shap-rank-by", f.shap_rank_by, "abs | signed");
  app->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--timings", f.timings, "Record per-query wall time (reports stop being reproducible)");
}

template <typename F>
auto config_step(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

struct Loaded {
  std::optional<Dataset> train;
  Dataset test;
  RankerPtr model;
};

ModelSpec model_spec(const ModelFlags& f) {
  ModelSpec spec = config_step([&] { return parse_model_spec(f.model); });
  spec.linear.l2 = f.l2;
  spec.pairwise.epochs = f.epochs;
  spec.pairwise.pairs_per_query = f.train_pairs;
  spec.pairwise.seed = f.seed;
  spec.trees.n_trees = f.trees;
  spec.trees.max_depth = f.depth;
  spec.trees.min_leaf = f.min_leaf;
  spec.trees.subsample = f.subsample;
  spec.trees.seed = f.seed;
  if (f.learning_rate > 0) {
    spec.pairwise.learning_rate = f.learning_rate;
    spec.trees.learning_rate = f.learning_rate;
  }
  const bool trainable = spec.kind != RankerKind::kExternal;
  if (trainable && f.model_file.empty() && f.train.empty()) {
    throw ConfigError("--model " + f.model + " needs --train (or pass --model-file)");
  }
  return spec;
}

Loaded load(const ModelFlags& mf, const std::string& test_path) {
  Loaded l;
  if (!mf.model_file.empty()) {
    l.model = load_model_file(mf.model_file);
    if (!mf.train.empty()) l.train = load_letor(mf.train, l.model->feature_count());
    l.test = load_letor(test_path, l.model->feature_count());
  } else {
    const ModelSpec spec = model_spec(mf);
    if (!mf.train.empty()) l.train = load_letor(mf.train);
    const Index m = l.train ? l.train->feature_count : 0;
    l.test = load_letor(test_path, m);
    if (l.train && l.test.feature_count > m) {
      l.train = load_letor(mf.train, l.test.feature_count);
    }
    l.model = build_model(spec, l.train ? &*l.train : nullptr, l.test.feature_count);
  }
  if (l.test.feature_count != l.model->feature_count()) {
    throw Error("test data has " + std::to_string(l.test.feature_count) + " features, model expects " +
                std::to_string(l.model->feature_count()));
  }
  return l;
}

QuerySelector parse_queries(const std::string& text, std::uint64_t seed) {
  QuerySelector sel;
  if (text == "all") return sel;
  if (text.rfind("sample:", 0) == 0) {
    try {
      std::size_t used = 0;
      const auto n = std::stoul(text.substr(7), &used);
      if (used != text.size() - 7 || n == 0) throw std::invalid_argument(text);
      sel.sample_size = n;
      sel.seed = seed;
      return sel;
    } catch (const std::exception&) {
      throw ConfigError("bad --queries '" + text + "' (expected all | sample:N | qid,...)");
    }
  }
  std::stringstream in(text);
  for (std::string qid; std::getline(in, qid, ',');) {
    if (!qid.empty()) sel.qids.push_back(qid);
  }
  if (sel.qids.empty()) throw ConfigError("bad --queries '" + text + "'");
  return sel;
}

ExperimentConfig experiment_config(const RunFlags& f, const Loaded& l) {
  ExperimentConfig cfg;
  cfg.methods.clear();
  for (const auto& name : f.methods) {
    if (name == "shap") {
      cfg.methods.push_back(f.shap_variant == 5 ? Method::kShap5 : Method::kShap1);
    } else {
      cfg.methods.push_back(config_step([&] { return parse_method(name); }));
    }
  }
  if (f.k < 1) throw ConfigError("--k must be >= 1");
  if (f.pairs < 1) throw ConfigError("--pairs must be >= 1");
  if (f.seeds < 1) throw ConfigError("--seeds must be >= 1");
  cfg.explain.k = f.k;
  cfg.explain.pair_sample_size = f.pairs;
  cfg.explain.epsilon = config_step([&] { return parse_epsilon(f.epsilon); });
  cfg.explain.n_seeds = f.seeds;
  const MaskMode mode = config_step([&] { return parse_mask_mode(f.mask_policy); });
  cfg.explain.mask_policy = MaskPolicy::from_mode(mode, l.train ? *l.train : l.test);
  cfg.shap.n_samples = f.shap_samples;
  cfg.shap.background_size = f.shap_background;
  cfg.shap_rank_by = config_step([&] { return parse_shap_rank_by(f.shap_rank_by); });
  cfg.queries = parse_queries(f.queries, f.seed);
  cfg.seed = f.seed;
  cfg.threads = f.threads;
  cfg.record_timings = f.timings;
  return cfg;
}

// Writes to --out (atomically replaced) or stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp);
    out << text;
    if (!out.flush()) throw Error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("cannot rename " + tmp + " to " + path);
}

std::vector<FeatureId> parse_feature_list(const std::string& text) {
  std::vector<FeatureId> ids;
  std::stringstream in(text);
  for (std::string tok; std::getline(in, tok, ',');) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
      ids.push_back(v - 1);
    } catch (const std::exception&) {
      throw ConfigError("bad feature id '" + tok + "' (1-based integers expected)");
    }
  }
  return ids;
}

int run(int argc, char** argv) {
  CLI::App app{"Valid feature-subset explanations for learning-to-rank models"};
  app.require_subcommand(1);

  ModelFlags mf;
  RunFlags rf;

  auto* train_cmd = app.add_subcommand("train", "Train a ranker and save it");
  add_model_flags(train_cmd, mf, false);
  std::string model_out;
  std::string train_test;
  train_cmd->add_option("--model-out", model_out, "Where to write the model")->required();
  train_cmd->add_option("--test", train_test, "Report NDCG@10 on this split")->check(CLI::ExistingFile);

  auto* explain_cmd = app.add_subcommand("explain", "Explain test queries and write a JSON Lines report");
  add_model_flags(explain_cmd, mf, true);
  add_run_flags(explain_cmd, rf, true);

  auto* eval_cmd = app.add_subcommand("evaluate", "NDCG@10 of a model; optionally re-check a report");
  add_model_flags(eval_cmd, mf, true);
  std::string eval_test, eval_report, eval_mask = "zero";
  eval_cmd->add_option("--test", eval_test, "Test data")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--report", eval_report, "Report to recompute")->check(CLI::ExistingFile);
  eval_cmd->add_option("--mask-policy", eval_mask, "Mask policy the report was produced with");

  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force optimal explanations");
  add_model_flags(oracle_cmd, mf, true);
  std::string oracle_test, oracle_out, oracle_queries = "all", oracle_mask = "zero", universe;
  int oracle_k = 3;
  std::uint64_t budget = 1'000'000, oracle_seed = 0;
  oracle_cmd->add_option("--test", oracle_test, "Test data")->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--k", oracle_k, "Subset size");
  oracle_cmd->add_option("--budget", budget, "Maximum number of subsets per query");
  oracle_cmd->add_option("--queries", oracle_queries, "all | sample:N | qid,...");
  oracle_cmd->add_option("--seed", oracle_seed, "Seed for query sampling");
  oracle_cmd->add_option("--mask-policy", oracle_mask, "zero | mean");
  oracle_cmd->add_option("--submodularity", universe, "Also probe the submodularity ratio on these 1-based features");
  oracle_cmd->add_option("--out", oracle_out, "Output path (default stdout)");

  auto* synth_cmd = app.add_subcommand("synthetic", "Generate a planted-feature suite");
  SyntheticSpec spec;
  std::string kind = "linear", planted = "3,6,8", synth_out, synth_model_out;
  synth_cmd->add_option("--kind", kind, "linear | interaction | duplicated-columns");
  synth_cmd->add_option("--n-queries", spec.n_queries, "Queries")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--docs", spec.docs_per_query, "Documents per query")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--features", spec.feature_count, "Feature count")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--planted", planted, "Planted 1-based feature ids");
  synth_cmd->add_option("--noise", spec.noise, "Label noise standard deviation");
  synth_cmd->add_option("--seed", spec.seed, "Generator seed");
  synth_cmd->add_option("--out", synth_out, "LETOR output path")->required();
  synth_cmd->add_option("--model-out", synth_model_out, "Ground-truth model output path");

  auto* k_cmd = app.add_subcommand("effect-of-k", "Mean validity per (method, k) as TSV");
  add_model_flags(k_cmd, mf, true);
  add_run_flags(k_cmd, rf, true);
  std::vector<int> k_values = {3, 5, 7, 10};
  k_cmd->add_option("--k-values", k_values, "Ascending explanation sizes")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (train_cmd->parsed()) {
    const ModelSpec spec = model_spec(mf);
    if (spec.kind == RankerKind::kExternal) throw ConfigError("external models cannot be trained");
    Dataset train = load_letor(mf.train);
    std::optional<Dataset> test;
    if (!train_test.empty()) {
      test = load_letor(train_test, train.feature_count);
      if (test->feature_count > train.feature_count) train = load_letor(mf.train, test->feature_count);
    }
    const auto model = build_model(spec, &train, train.feature_count);
    save_model_file(model_out, *model);
    json summary = {{"model", to_string(model->kind())},
                    {"features", model->feature_count()},
                    {"train_ndcg@10", sanity_ndcg(*model, train)}};
    if (test) summary["test_ndcg@10"] = sanity_ndcg(*model, *test);
    std::cout << summary.dump() << '\n';
    return 0;
  }

  if (explain_cmd->parsed()) {
    const Loaded l = load(mf, rf.test);
    const ExperimentConfig cfg = experiment_config(rf, l);
    const auto result = run_experiment(*l.model, l.test, cfg, l.train ? &*l.train : nullptr);
    std::ostringstream out;
    write_report(out, result);
    emit(rf.out, out.str());
    return 0;
  }

  if (eval_cmd->parsed()) {
    const Loaded l = load(mf, eval_test);
    json summary = {{"model", to_string(l.model->kind())}, {"ndcg@10", sanity_ndcg(*l.model, l.test)}};
    if (!eval_report.empty()) {
      const MaskMode mode = config_step([&] { return parse_mask_mode(eval_mask); });
      const MaskPolicy policy = MaskPolicy::from_mode(mode, l.train ? *l.train : l.test);
      std::ifstream in(eval_report);
      const ParsedReport report = read_report(in);
      std::size_t mismatches = 0;
      for (const auto& r : report.reports) {
        std::vector<FeatureId> ids;
        for (int f : r.selected) ids.push_back(f - 1);
        const FeatureMask mask(l.model->feature_count(), ids);
        const auto& q = l.test.query(r.qid);
        if (validity(*l.model, q, mask, policy) != r.validity ||
            completeness(*l.model, q, mask, policy) != r.completeness) {
          ++mismatches;
        }
      }
      summary["report_rows"] = report.reports.size();
      summary["report_mismatches"] = mismatches;
    }
    std::cout << summary.dump() << '\n';
    return 0;
  }

  if (oracle_cmd->parsed()) {
    const Loaded l = load(mf, oracle_test);
    const MaskMode mode = config_step([&] { return parse_mask_mode(oracle_mask); });
    const MaskPolicy policy = MaskPolicy::from_mode(mode, l.train ? *l.train : l.test);
    const auto ids = universe.empty() ? std::vector<FeatureId>{} : parse_feature_list(universe);
    if (oracle_k < 0 || oracle_k > l.model->feature_count()) throw ConfigError("--k outside [0, M]");
    const Dataset test = split_queries(l.test, parse_queries(oracle_queries, oracle_seed));
    std::ostringstream out;
    for (const auto& q : test.queries) {
      if (q.size() < 2) continue;
      const auto r = brute_force_optimal(*l.model, q, oracle_k, policy, budget);
      std::vector<int> subset;
      for (FeatureId f : r.best_subset) subset.push_back(f + 1);
      json line = {{"schema", kReportSchema},  {"type", "oracle"},
                   {"qid", q.qid},             {"k", oracle_k},
                   {"best_subset", subset},    {"best_validity", r.best_validity},
                   {"subsets_evaluated", r.subsets_evaluated}};
      if (!universe.empty()) {
        const auto probe = submodularity_ratio(*l.model, q, ids, oracle_k, policy);
        std::vector<int> wl, ws;
        for (FeatureId f : probe.witness_l) wl.push_back(f + 1);
        for (FeatureId f : probe.witness_s) ws.push_back(f + 1);
        line["submodularity"] = {{"gamma", probe.gamma},
                                 {"shift", probe.shift},
                                 {"witness_l", wl},
                                 {"witness_s", ws},
                                 {"pairs_evaluated", probe.pairs_evaluated},
                                 {"pairs_skipped", probe.pairs_skipped}};
      }
      out << line.dump() << '\n';
    }
    emit(oracle_out, out.str());
    return 0;
  }

  if (synth_cmd->parsed()) {
    spec.kind = config_step([&] { return parse_generator_kind(kind); });
    spec.planted = parse_feature_list(planted);
    const auto suite = config_step([&] { return generate_synthetic(spec); });
    std::ostringstream out;
    write_letor(out, suite.dataset);
    emit(synth_out, out.str());
    if (!synth_model_out.empty()) save_model_file(synth_model_out, *suite.model);
    return 0;
  }

  if (k_cmd->parsed()) {
    const Loaded l = load(mf, rf.test);
    const ExperimentConfig cfg = experiment_config(rf, l);
    if (k_values.empty() || !std::is_sorted(k_values.begin(), k_values.end()) || k_values.front() < 1) {
      throw ConfigError("--k-values must be positive and ascending");
    }
    const auto rows = effect_of_k(*l.model, l.test, cfg, k_values, l.train ? &*l.train : nullptr);
    std::ostringstream out;
    write_k_table(out, rows);
    emit(rf.out, out.str());
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "rankex: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "rankex: " << e.what() << '\n';
    return 2;
  }
}
