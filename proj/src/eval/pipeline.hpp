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
#include <vector>

#include "corpus/corpus.hpp"
#include "encoder/student.hpp"
#include "encoder/teacher.hpp"
#include "eval/metrics.hpp"
#include "index/mips_index.hpp"

namespace retdistill {

struct QuestionOutcome {
  std::int64_t question_id = 0;
  std::vector<std::int64_t> retrieved;
  std::vector<std::int64_t> reranked;
  bool retrieval_hit = false;
  bool correct = false;
};

/// Retrieve top-k with the student, re-rank with the teacher (stable, so ties
/// keep retrieval order); a question is answered correctly when the teacher's
/// first passage contains an answer.
struct PipelineResult {
  std::size_t k = 0;
  std::vector<QuestionOutcome> per_question;
  double accuracy = 0.0;
  double retrieval_recall = 0.0;
};

PipelineResult end_to_end_accuracy(const MipsIndex& index, const TwoTowerStudent& student,
                                   const OneTowerTeacher& teacher,
                                   std::span<const Question> questions, const Corpus& corpus,
                                   std::size_t k, std::size_t workers = 1);

struct CurvePoint {
  std::size_t k = 0;
  double accuracy = 0.0;
  double retrieval_recall = 0.0;
};

std::vector<CurvePoint> sweep_k(const MipsIndex& index, const TwoTowerStudent& student,
                                const OneTowerTeacher& teacher,
                                std::span<const Question> questions, const Corpus& corpus,
                                std::span<const std::size_t> k_values,
                                std::size_t workers = 1);

/// {1,2,5,10,20,30,40,50,100} truncated to the corpus size.
std::vector<std::size_t> default_sweep_grid(std::size_t corpus_size);

struct LatencyPoint {
  std::size_t k = 0;
  double mean_ms = 0.0;
};

/// Wall-clock time per question to score and sort k retrieved candidates with
/// the teacher, from the fastest of `repeats` passes over all questions.
/// Retrieval itself is not timed.
std::vector<LatencyPoint> rerank_latency(const MipsIndex& index,
                                         const TwoTowerStudent& student,
                                         const OneTowerTeacher& teacher,
                                         std::span<const Question> questions,
                                         const Corpus& corpus,
                                         std::span<const std::size_t> k_values,
                                         std::size_t repeats = 1);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

/// One plain-text record per line: metric k value n seed variant.
struct ReportRecord {
  std::string metric;
  std::size_t k = 0;
  double value = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string variant;
};

std::string format_records(std::span<const ReportRecord> records);

}  // namespace retdistill
