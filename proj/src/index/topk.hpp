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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "index/mips_index.hpp"

namespace retdistill::detail {

// Higher score first, smaller id on ties.
inline bool ranks_before(double sa, std::int64_t ia, double sb, std::int64_t ib) {
  return sa > sb || (sa == sb && ia < ib);
}

/// Bounded selection of the k best (score, id) pairs.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { heap_.reserve(k + 1); }

  void push(double score, std::int64_t id) {
    if (k_ == 0) return;
    if (heap_.size() < k_) {
      heap_.emplace_back(score, id);
      std::push_heap(heap_.begin(), heap_.end(), cmp);
    } else if (ranks_before(score, id, heap_.front().first, heap_.front().second)) {
      std::pop_heap(heap_.begin(), heap_.end(), cmp);
      heap_.back() = {score, id};
      std::push_heap(heap_.begin(), heap_.end(), cmp);
    }
  }

  SearchResult take() {
    std::sort(heap_.begin(), heap_.end(), cmp);
    SearchResult r;
    r.ids.reserve(heap_.size());
    r.scores.reserve(heap_.size());
    for (const auto& [s, id] : heap_) {
      r.ids.push_back(id);
      r.scores.push_back(s);
    }
    heap_.clear();
    return r;
  }

 private:
  static bool cmp(const std::pair<double, std::int64_t>& a,
                  const std::pair<double, std::int64_t>& b) {
    return ranks_before(a.first, a.second, b.first, b.second);
  }

  std::size_t k_;
  std::vector<std::pair<double, std::int64_t>> heap_;
};

}  // namespace retdistill::detail
