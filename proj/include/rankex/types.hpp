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

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>
#include <stdexcept>
#include <string>

namespace rankex {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VecX = Vector<double>;
using MatX = Matrix<double>;
using VecXi = Vector<int>;

// Feature ids are 0-based internally; LETOR I/O is 1-based.
using FeatureId = int;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// splitmix64 finalizer; used to derive independent seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Uniform `count`-subset of {0..total-1} without replacement, ascending
// (selection sampling).
template <typename Rng>
std::vector<std::size_t> sample_indices(std::size_t total, std::size_t count, Rng& rng) {
  std::vector<std::size_t> out;
  if (count > total) count = total;
  out.reserve(count);
  std::size_t needed = count;
  for (std::size_t i = 0; i < total && needed > 0; ++i) {
    std::uniform_int_distribution<std::size_t> draw(0, total - i - 1);
    if (draw(rng) < needed) {
      out.push_back(i);
      --needed;
    }
  }
  return out;
}

}  // namespace rankex
