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

// Test double for the external scorer protocol.
//   fake_scorer first          score = feature 1
//   fake_scorer linear W,...   score = w . x
//   fake_scorer garbage        answers with a non-numeric line
//   fake_scorer die            exits on the first request

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::vector<double> parse_csv(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) return 2;
  const std::string mode = argv[1];
  std::vector<double> weights;
  if (mode == "linear") {
    if (argc < 3) return 2;
    weights = parse_csv(argv[2]);
  }
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line == "QUIT") return 0;
    if (line.rfind("SCORE ", 0) != 0) return 3;
    const auto x = parse_csv(line.substr(6));
    if (mode == "die") return 0;
    if (mode == "garbage") {
      std::cout << "not-a-number" << std::endl;
      continue;
    }
    double s = 0.0;
    if (mode == "first") {
      s = x.at(0);
    } else {
      for (std::size_t i = 0; i < weights.size() && i < x.size(); ++i) s += weights[i] * x[i];
    }
    std::cout.precision(17);
    std::cout << s << std::endl;
  }
  return 0;
}
