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

#include <rankex/letor.hpp>

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace rankex {

namespace {

struct RawDoc {
  int label;
  std::vector<std::pair<Index, double>> values;  // 0-based fid, value
  std::string comment;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_tokens(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) tokens.push_back(s.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string read_gzip(const std::string& path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) throw Error("cannot open " + path);
  std::string content;
  char buffer[1 << 16];
  int n = 0;
  while ((n = gzread(file, buffer, sizeof(buffer))) > 0) {
    content.append(buffer, static_cast<std::size_t>(n));
  }
  const bool failed = n < 0;
  gzclose(file);
  if (failed) throw Error("gzip read error in " + path);
  return content;
}

}  // namespace

DocVector QueryGroup::doc(Index i) const {
  DocVector d;
  d.doc_index = i;
  d.label = labels(i);
  d.features = features.row(i).transpose();
  d.comment = comments.at(static_cast<std::size_t>(i));
  return d;
}

Index Dataset::doc_count() const {
  Index n = 0;
  for (const auto& q : queries) n += q.size();
  return n;
}

const QueryGroup& Dataset::query(const std::string& qid) const {
  for (const auto& q : queries) {
    if (q.qid == qid) return q;
  }
  throw Error("unknown qid " + qid);
}

Dataset parse_letor(std::istream& in, Index min_features) {
  std::vector<std::string> qid_order;
  std::unordered_map<std::string, std::vector<RawDoc>> groups;
  Index max_fid = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    std::string comment;
    bool has_comment = false;
    if (auto hash = body.find('#'); hash != std::string_view::npos) {
      comment = std::string(body.substr(hash + 1));
      has_comment = true;
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (body.empty()) {
      if (has_comment) throw ParseError(line_no, "comment without document");
      continue;
    }
    auto tokens = split_tokens(body);
    if (tokens.size() < 2) throw ParseError(line_no, "expected '<label> qid:<qid> ...'");

    RawDoc doc;
    doc.comment = std::move(comment);
    if (!parse_number(tokens[0], doc.label) || doc.label < 0) {
      throw ParseError(line_no, "malformed label '" + std::string(tokens[0]) + "'");
    }
    if (tokens[1].substr(0, 4) != "qid:" || tokens[1].size() == 4) {
      throw ParseError(line_no, "malformed qid token '" + std::string(tokens[1]) + "'");
    }
    std::string qid(tokens[1].substr(4));
    for (std::size_t t = 2; t < tokens.size(); ++t) {
      auto colon = tokens[t].find(':');
      Index fid = 0;
      double value = 0.0;
      if (colon == std::string_view::npos || !parse_number(tokens[t].substr(0, colon), fid) ||
          fid < 1 || !parse_number(tokens[t].substr(colon + 1), value)) {
        throw ParseError(line_no, "malformed feature token '" + std::string(tokens[t]) + "'");
      }
      max_fid = std::max(max_fid, fid);
      doc.values.emplace_back(fid - 1, value);
    }
    auto [it, inserted] = groups.try_emplace(qid);
    if (inserted) qid_order.push_back(qid);
    it->second.push_back(std::move(doc));
  }
  if (qid_order.empty()) throw ParseError(line_no, "empty input");

  const Index m = std::max<Index>({max_fid, min_features, 1});
  std::vector<QueryGroup> queries;
  queries.reserve(qid_order.size());
  for (const auto& qid : qid_order) {
    auto& docs = groups[qid];
    QueryGroup q;
    q.qid = qid;
    const auto n = static_cast<Index>(docs.size());
    q.labels.resize(n);
    q.features = MatX::Zero(n, m);
    q.comments.reserve(docs.size());
    for (Index i = 0; i < n; ++i) {
      auto& d = docs[static_cast<std::size_t>(i)];
      q.labels(i) = d.label;
      for (auto [fid, value] : d.values) q.features(i, fid) = value;
      q.comments.push_back(std::move(d.comment));
    }
    queries.push_back(std::move(q));
  }
  return make_dataset(std::move(queries));
}

Dataset parse_letor_string(const std::string& text, Index min_features) {
  std::istringstream in(text);
  return parse_letor(in, min_features);
}

Dataset load_letor(const std::string& path, Index min_features) {
  const bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
  if (gz) {
    std::istringstream in(read_gzip(path));
    return parse_letor(in, min_features);
  }
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_letor(in, min_features);
}

void write_letor(std::ostream& out, const Dataset& dataset) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& q : dataset.queries) {
    for (Index i = 0; i < q.size(); ++i) {
      out << q.labels(i) << " qid:" << q.qid;
      for (Index j = 0; j < q.feature_count(); ++j) out << ' ' << (j + 1) << ':' << q.features(i, j);
      const auto& comment = q.comments.at(static_cast<std::size_t>(i));
      if (!comment.empty()) out << " #" << comment;
      out << '\n';
    }
  }
  out.precision(old_precision);
}

BackgroundStats background_stats(const std::vector<QueryGroup>& queries) {
  if (queries.empty()) throw Error("background statistics of an empty dataset");
  const Index m = queries.front().feature_count();
  BackgroundStats stats;
  stats.means = VecX::Zero(m);
  stats.mins = VecX::Constant(m, std::numeric_limits<double>::infinity());
  stats.maxs = VecX::Constant(m, -std::numeric_limits<double>::infinity());
  Index n = 0;
  for (const auto& q : queries) {
    if (q.feature_count() != m) throw Error("queries disagree on feature count");
    stats.means += q.features.colwise().sum().transpose();
    stats.mins = stats.mins.cwiseMin(q.features.colwise().minCoeff().transpose());
    stats.maxs = stats.maxs.cwiseMax(q.features.colwise().maxCoeff().transpose());
    n += q.size();
  }
  if (n == 0) throw Error("background statistics of an empty dataset");
  stats.means /= static_cast<double>(n);
  // Rounding can push a constant column's mean a hair outside [min, max].
  stats.means = stats.means.cwiseMax(stats.mins).cwiseMin(stats.maxs);
  return stats;
}

BackgroundStats background_stats(const Dataset& dataset) {
  return background_stats(dataset.queries);
}

Dataset make_dataset(std::vector<QueryGroup> queries) {
  Dataset d;
  auto stats = background_stats(queries);
  d.feature_count = stats.means.size();
  d.feature_means = std::move(stats.means);
  d.feature_mins = std::move(stats.mins);
  d.feature_maxs = std::move(stats.maxs);
  d.queries = std::move(queries);
  return d;
}

Dataset split_queries(const Dataset& dataset, const QuerySelector& selector) {
  std::vector<QueryGroup> picked;
  if (selector.sample_size) {
    const std::size_t n = *selector.sample_size;
    if (n > dataset.queries.size()) {
      throw Error("cannot sample " + std::to_string(n) + " of " +
                  std::to_string(dataset.queries.size()) + " queries");
    }
    std::mt19937_64 rng(selector.seed);
    std::sample(dataset.queries.begin(), dataset.queries.end(), std::back_inserter(picked), n,
                rng);
  } else if (!selector.qids.empty()) {
    for (const auto& qid : selector.qids) picked.push_back(dataset.query(qid));
  } else {
    return dataset;
  }
  return make_dataset(std::move(picked));
}

MatX sample_rows(const Dataset& dataset, std::size_t count, std::uint64_t seed) {
  const auto total = static_cast<std::size_t>(dataset.doc_count());
  count = std::min(count, total);
  std::mt19937_64 rng(seed);
  const auto ids = sample_indices(total, count, rng);

  MatX rows(static_cast<Index>(count), dataset.feature_count);
  std::size_t offset = 0;
  std::size_t next = 0;
  for (const auto& q : dataset.queries) {
    const auto n = static_cast<std::size_t>(q.size());
    while (next < ids.size() && ids[next] < offset + n) {
      rows.row(static_cast<Index>(next)) = q.features.row(static_cast<Index>(ids[next] - offset));
      ++next;
    }
    offset += n;
  }
  return rows;
}

}  // namespace rankex
