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

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rankex {

namespace {

constexpr int kModelFormatVersion = 1;

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void write_vector(std::ostream& out, const char* key, const VecX& v) {
  out << key;
  for (Index i = 0; i < v.size(); ++i) out << ' ' << fmt(v(i));
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw Error("model file truncated");
    return w;
  }

  void expect(const std::string& key) {
    const auto w = word();
    if (w != key) throw Error("model file: expected '" + key + "', found '" + w + "'");
  }

  double number() {
    const auto w = word();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size()) throw Error("model file: bad number '" + w + "'");
    return v;
  }

  long integer() {
    const auto w = word();
    long v = 0;
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || ptr != w.data() + w.size()) throw Error("model file: bad integer '" + w + "'");
    return v;
  }

  VecX vector(const std::string& key, Index n) {
    expect(key);
    VecX v(n);
    for (Index i = 0; i < n; ++i) v(i) = number();
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_model(std::ostream& out, const Ranker& model) {
  out << "rankex-model " << kModelFormatVersion << '\n';
  out << "kind " << to_string(model.kind()) << '\n';
  out << "features " << model.feature_count() << '\n';
  switch (model.kind()) {
    case RankerKind::kPointwiseLinear: {
      const auto& m = static_cast<const LinearRanker&>(model);
      out << "bias " << fmt(m.bias()) << '\n';
      write_vector(out, "weights", m.weights());
      break;
    }
    case RankerKind::kPairwiseLogistic: {
      write_vector(out, "weights", static_cast<const PairwiseLogisticRanker&>(model).weights());
      break;
    }
    case RankerKind::kTreeEnsemble: {
      const auto& m = static_cast<const TreeEnsembleRanker&>(model);
      out << "base " << fmt(m.base_score()) << '\n';
      out << "shrinkage " << fmt(m.shrinkage()) << '\n';
      out << "trees " << m.trees().size() << '\n';
      for (const auto& t : m.trees()) {
        out << "tree " << t.nodes.size() << '\n';
        for (const auto& nd : t.nodes) {
          out << nd.feature << ' ' << fmt(nd.threshold) << ' ' << nd.left << ' ' << nd.right << ' '
              << fmt(nd.value) << '\n';
        }
      }
      break;
    }
    case RankerKind::kPlanted: {
      const auto& m = static_cast<const PlantedRanker&>(model);
      write_vector(out, "weights", m.weights());
      out << "interactions " << m.interactions().size() << '\n';
      for (const auto& term : m.interactions()) {
        out << term.a << ' ' << term.b << ' ' << fmt(term.weight) << '\n';
      }
      break;
    }
    case RankerKind::kExternal:
      throw Error("external scorers have no parameters to save");
  }
}

RankerPtr load_model(std::istream& in) {
  Reader r(in);
  r.expect("rankex-model");
  const long version = r.integer();
  if (version != kModelFormatVersion) {
    throw Error("unsupported model format version " + std::to_string(version));
  }
  r.expect("kind");
  const auto kind = r.word();
  r.expect("features");
  const Index m = r.integer();
  if (m < 1) throw Error("model file: feature count must be positive");

  if (kind == "linear") {
    r.expect("bias");
    const double bias = r.number();
    return std::make_shared<LinearRanker>(r.vector("weights", m), bias);
  }
  if (kind == "pairwise") return std::make_shared<PairwiseLogisticRanker>(r.vector("weights", m));
  if (kind == "gbdt") {
    r.expect("base");
    const double base = r.number();
    r.expect("shrinkage");
    const double shrinkage = r.number();
    r.expect("trees");
    const long n_trees = r.integer();
    std::vector<RegressionTree> trees(static_cast<std::size_t>(n_trees));
    for (auto& t : trees) {
      r.expect("tree");
      const long n_nodes = r.integer();
      t.nodes.resize(static_cast<std::size_t>(n_nodes));
      for (auto& nd : t.nodes) {
        nd.feature = static_cast<FeatureId>(r.integer());
        nd.threshold = r.number();
        nd.left = static_cast<int>(r.integer());
        nd.right = static_cast<int>(r.integer());
        nd.value = r.number();
        if (nd.feature >= m) throw Error("model file: split feature out of range");
        if (!nd.is_leaf() && (nd.left <= 0 || nd.right <= 0 || nd.left >= n_nodes || nd.right >= n_nodes)) {
          throw Error("model file: bad child index");
        }
      }
    }
    return std::make_shared<TreeEnsembleRanker>(m, base, shrinkage, std::move(trees));
  }
  if (kind == "planted") {
    VecX w = r.vector("weights", m);
    r.expect("interactions");
    const long n = r.integer();
    std::vector<PlantedRanker::Interaction> terms(static_cast<std::size_t>(n));
    for (auto& term : terms) {
      term.a = static_cast<FeatureId>(r.integer());
      term.b = static_cast<FeatureId>(r.integer());
      term.weight = r.number();
      if (term.a < 0 || term.a >= m || term.b < 0 || term.b >= m) {
        throw Error("model file: interaction feature out of range");
      }
    }
    return std::make_shared<PlantedRanker>(std::move(w), std::move(terms));
  }
  throw Error("model file: unknown kind '" + kind + "'");
}

void save_model_file(const std::string& path, const Ranker& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  save_model(out, model);
}

RankerPtr load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return load_model(in);
}

}  // namespace rankex
