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
#include <optional>
#include <span>
#include <vector>

#include "corpus/corpus.hpp"
#include "encoder/student.hpp"
#include "index/mips_index.hpp"

namespace retdistill {

struct RecallReport {
  std::vector<std::size_t> k_values;
  std::vector<double> recall;
  std::size_t n_questions = 0;
};

/// 0-based position of the first answer-bearing passage in a ranked id list.
std::optional<std::size_t> first_hit_rank(std::span<const std::int64_t> ranked_ids,
                                          const Question& q, const Corpus& corpus);

/// Fraction of questions whose first hit rank is < k, for each k.
RecallReport recall_from_ranks(std::span<const std::optional<std::size_t>> ranks,
                               std::span<const std::size_t> k_values);

/// Retrieves top-max(k) with the student's question embedding and reports
/// recall at every k. k_values must be ascending; every question needs at
/// least one answer string.
RecallReport recall_at_k(const MipsIndex& index, const TwoTowerStudent& student,
                         std::span<const Question> questions, const Corpus& corpus,
                         std::span<const std::size_t> k_values, std::size_t workers = 1);

}  // namespace retdistill
