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

#include <rankex/types.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rankex {

// One document as read from a LETOR line.
struct DocVector {
  Index doc_index = 0;
  int label = 0;
  VecX features;
  std::string comment;
};

// All documents retrieved for one query. Row i of `features` is document i.
struct QueryGroup {
  std::string qid;
  VecXi labels;
  MatX features;
  std::vector<std::string> comments;

  Index size() const { return features.rows(); }
  Index feature_count() const { return features.cols(); }
  DocVector doc(Index i) const;
};

struct Dataset {
  std::vector<QueryGroup> queries;
  Index feature_count = 0;
  VecX feature_means;
  VecX feature_mins;
  VecX feature_maxs;

  Index doc_count() const;
  const QueryGroup& query(const std::string& qid) const;
};

struct BackgroundStats {
  VecX means;
  VecX mins;
  VecX maxs;
};

// Parses `<label> qid:<qid> <fid>:<val> ... [# comment]` lines. Documents are
// grouped by qid in order of first appearance. Throws ParseError.
// `min_features` widens the feature space when a file never mentions the
// highest feature id (e.g. a test split sharing a train split's width).
Dataset parse_letor(std::istream& in, Index min_features = 0);
Dataset parse_letor_string(const std::string& text, Index min_features = 0);
// Reads plain or gzip-compressed (".gz") files.
Dataset load_letor(const std::string& path, Index min_features = 0);

// Writes the dataset back in LETOR form (1-based fids, every feature written).
void write_letor(std::ostream& out, const Dataset& dataset);

BackgroundStats background_stats(const std::vector<QueryGroup>& queries);
BackgroundStats background_stats(const Dataset& dataset);

// Builds a Dataset from query groups and fills in the background statistics.
Dataset make_dataset(std::vector<QueryGroup> queries);

struct QuerySelector {
  // Either explicit qids, or a uniform sample of `sample_size` queries.
  std::vector<std::string> qids;
  std::optional<std::size_t> sample_size;
  std::uint64_t seed = 0;

  static QuerySelector all() { return {}; }
};

// Sampled queries keep their original relative order.
Dataset split_queries(const Dataset& dataset, const QuerySelector& selector);

// Uniform sample of document rows (without replacement) across all queries.
MatX sample_rows(const Dataset& dataset, std::size_t count, std::uint64_t seed);

}  // namespace rankex
