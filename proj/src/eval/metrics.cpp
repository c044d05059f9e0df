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

#include "eval/metrics.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "common/parallel.hpp"

namespace retdistill {

std::optional<std::size_t> first_hit_rank(std::span<const std::int64_t> ranked_ids,
                                          const Question& q, const Corpus& corpus) {
  require(!q.answers.empty(), "question " + std::to_string(q.id) + " has no answers");
  for (std::size_t r = 0; r < ranked_ids.size(); ++r) {
    if (contains_answer(corpus.at(ranked_ids[r]), q.answers)) return r;
  }
  return std::nullopt;
}

RecallReport recall_from_ranks(std::span<const std::optional<std::size_t>> ranks,
                               std::span<const std::size_t> k_values) {
  require(std::is_sorted(k_values.begin(), k_values.end()), "k_values must be ascending");
  RecallReport report;
  report.k_values.assign(k_values.begin(), k_values.end());
  report.n_questions = ranks.size();
  for (std::size_t k : k_values) {
    std::size_t hits = 0;
    for (const auto& r : ranks) hits += (r && *r < k) ? 1 : 0;
    report.recall.push_back(ranks.empty() ? 0.0
                                          : static_cast<double>(hits) /
                                                static_cast<double>(ranks.size()));
  }
  return report;
}

RecallReport recall_at_k(const MipsIndex& index, const TwoTowerStudent& student,
                         std::span<const Question> questions, const Corpus& corpus,
                         std::span<const std::size_t> k_values, std::size_t workers) {
  require(!k_values.empty(), "k_values is empty");
  require(std::is_sorted(k_values.begin(), k_values.end()), "k_values must be ascending");
  require(k_values.front() >= 1, "k must be >= 1");
  const std::size_t kmax = k_values.back();
  std::vector<std::optional<std::size_t>> ranks(questions.size());
  parallel_for(questions.size(), workers, [&](std::size_t i) {
    const auto hits = index.search(student.embed_question(questions[i]), kmax);
    ranks[i] = first_hit_rank(hits.ids, questions[i], corpus);
  });
  return recall_from_ranks(ranks, k_values);
}

}  // namespace retdistill
