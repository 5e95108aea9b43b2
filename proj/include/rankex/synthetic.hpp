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

#include <rankex/letor.hpp>
#include <rankex/ranker.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rankex {

enum class GeneratorKind { kLinear, kInteraction, kDuplicatedColumns };

GeneratorKind parse_generator_kind(const std::string& text);
std::string to_string(GeneratorKind kind);

struct SyntheticSpec {
  int n_queries = 50;
  int docs_per_query = 20;
  Index feature_count = 10;
  std::vector<FeatureId> planted;
  GeneratorKind kind = GeneratorKind::kLinear;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string qid_prefix = "q";
};

struct SyntheticSuite {
  Dataset dataset;
  std::shared_ptr<PlantedRanker> model;
  // Column holding an exact copy of planted[0] (duplicated-columns kind).
  FeatureId duplicate_of_first = -1;
};

// Features are uniform on [0, 1]. Labels are the planted score plus Gaussian
// noise, cut into grades {0, 1, 2} at the per-query terciles.
SyntheticSuite generate_synthetic(const SyntheticSpec& spec);

}  // namespace rankex
