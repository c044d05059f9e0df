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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpus/corpus.hpp"

namespace retdistill {

/// Hashed bag-of-words. Tokens are normalized, hashed into dim buckets and the
/// counts are scaled by 1/sqrt(#tokens).
class FeatureExtractor {
 public:
  static constexpr std::size_t kDefaultDim = 512;

  explicit FeatureExtractor(std::size_t dim = kDefaultDim, std::uint64_t seed = 0);

  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t bucket(std::string_view normalized_token) const;
  std::vector<double> extract(std::span<const std::string> tokens) const;
  std::vector<double> question(const Question& q) const;
  /// Title tokens followed by body tokens.
  std::vector<double> passage(const Passage& p) const;

  bool operator==(const FeatureExtractor&) const = default;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

}  // namespace retdistill
