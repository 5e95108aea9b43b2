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

#include <rankex/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>

namespace rankex {

namespace {

// Counts inversions of `seq` by merge sort; `seq` is sorted on return.
std::int64_t count_inversions(std::vector<Index>& seq, std::vector<Index>& scratch, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(seq, scratch, lo, mid) + count_inversions(seq, scratch, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (seq[i] <= seq[j]) {
      scratch[k++] = seq[i++];
    } else {
      inv += static_cast<std::int64_t>(mid - i);
      scratch[k++] = seq[j++];
    }
  }
  while (i < mid) scratch[k++] = seq[i++];
  while (j < hi) scratch[k++] = seq[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            seq.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

double kendall_tau(std::span<const Index> position_a, std::span<const Index> position_b) {
  const std::size_t n = position_a.size();
  if (position_b.size() != n) throw Error("kendall_tau: rankings cover different document sets");
  if (n < 2) throw Error("kendall_tau: undefined for fewer than 2 documents");

  // seq[p] = rank in b of the document at rank p in a.
  std::vector<Index> seq(n, -1);
  for (std::size_t d = 0; d < n; ++d) {
    const Index pa = position_a[d];
    if (pa < 0 || static_cast<std::size_t>(pa) >= n || seq[static_cast<std::size_t>(pa)] >= 0) {
      throw Error("kendall_tau: ranking is not a permutation");
    }
    seq[static_cast<std::size_t>(pa)] = position_b[d];
  }
  std::vector<Index> check(seq);
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (check[i] != static_cast<Index>(i)) throw Error("kendall_tau: rankings cover different document sets");
  }

  std::vector<Index> scratch(n);
  const std::int64_t discordant = count_inversions(seq, scratch, 0, n);
  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  return static_cast<double>(total - 2 * discordant) / static_cast<double>(total);
}

double kendall_tau(const Ranking& a, const Ranking& b) { return kendall_tau(a.position, b.position); }

double validity(const Ranker& model, const QueryGroup& query, const Ranking& original,
                const FeatureMask& mask, const MaskPolicy& policy) {
  return kendall_tau(rank(model, query, mask, policy), original);
}

double validity(const Ranker& model, const QueryGroup& query, const FeatureMask& mask,
                const MaskPolicy& policy) {
  return validity(model, query, rank(model, query), mask, policy);
}

double completeness(const Ranker& model, const QueryGroup& query, const Ranking& original,
                    const FeatureMask& mask, const MaskPolicy& policy) {
  return -kendall_tau(rank(model, query, mask.complement(), policy), original);
}

double completeness(const Ranker& model, const QueryGroup& query, const FeatureMask& mask,
                    const MaskPolicy& policy) {
  return completeness(model, query, rank(model, query), mask, policy);
}

ExplanationScore score_explanation(const Ranker& model, const QueryGroup& query,
                                   const Ranking& original, const FeatureMask& mask,
                                   const MaskPolicy& policy) {
  return {validity(model, query, original, mask, policy),
          completeness(model, query, original, mask, policy)};
}

double ndcg_at(int k, const Ranking& ranking, const VecXi& labels) {
  if (k <= 0) throw Error("ndcg_at: k must be positive");
  if (static_cast<Index>(ranking.order.size()) != labels.size()) {
    throw Error("ndcg_at: ranking and labels differ in length");
  }
  auto gain = [](int label) { return std::exp2(static_cast<double>(label)) - 1.0; };
  const std::size_t cutoff = std::min<std::size_t>(static_cast<std::size_t>(k), ranking.order.size());

  double dcg = 0.0;
  for (std::size_t p = 0; p < cutoff; ++p) {
    dcg += gain(labels(ranking.order[p])) / std::log2(static_cast<double>(p) + 2.0);
  }
  std::vector<int> ideal(labels.data(), labels.data() + labels.size());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t p = 0; p < cutoff; ++p) idcg += gain(ideal[p]) / std::log2(static_cast<double>(p) + 2.0);
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

}  // namespace rankex
