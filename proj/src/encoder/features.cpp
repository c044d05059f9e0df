// Copyright 2026 The retdistill Authors
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

#include "encoder/features.hpp"

#include <cmath>

#include "common/error.hpp"

namespace retdistill {

FeatureExtractor::FeatureExtractor(std::size_t dim, std::uint64_t seed)
    : dim_(dim), seed_(seed) {
  require(dim > 0, "feature dimension must be positive");
}

std::size_t FeatureExtractor::bucket(std::string_view token) const {
  // FNV-1a, seeded through the offset basis.
  std::uint64_t h = 1469598103934665603ULL ^ (seed_ * 0x9E3779B97F4A7C15ULL);
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return static_cast<std::size_t>(h % dim_);
}

std::vector<double> FeatureExtractor::extract(
    std::span<const std::string> tokens) const {
  std::vector<double> out(dim_, 0.0);
  std::size_t n = 0;
  for (const auto& t : tokens) {
    auto norm = normalize_token(t);
    if (norm.empty()) continue;
    out[bucket(norm)] += 1.0;
    ++n;
  }
  if (n > 0) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : out) v *= scale;
  }
  return out;
}

std::vector<double> FeatureExtractor::question(const Question& q) const {
  return extract(q.text);
}

std::vector<double> FeatureExtractor::passage(const Passage& p) const {
  auto tokens = tokenize(p.title);
  tokens.insert(tokens.end(), p.tokens.begin(), p.tokens.end());
  return extract(tokens);
}

}  // namespace retdistill
