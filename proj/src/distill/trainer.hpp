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
#include <span>
#include <string>
#include <vector>

#include "corpus/corpus.hpp"
#include "distill/config.hpp"
#include "encoder/model_io.hpp"
#include "encoder/student.hpp"
#include "encoder/teacher.hpp"
#include "index/mips_index.hpp"

namespace retdistill {

struct StepRecord {
  std::size_t step = 0;
  double kd_loss = 0.0;
  double contrastive_loss = 0.0;
  double lr = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double recall_at_1 = 0.0;
  double recall_at_20 = 0.0;
  double selection_recall = 0.0;
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;

  /// "step ..." and "epoch ..." key=value lines.
  std::string to_text() const;
};

struct TrainResult {
  Checkpoint best;
  TwoTowerStudent last;
  TrainLog log;
};

/// Passage each question is trained to retrieve: its first gold id, else the
/// first corpus passage containing an answer. Empty when neither exists.
std::vector<const Passage*> resolve_positives(std::span<const Question> questions,
                                              const Corpus& corpus);

/// Distillation finetuning. Candidates for each training question are the
/// top passages_per_question passages of candidate_index, queried with the
/// initial student's question embedding (the frozen retriever that produced
/// the index). Every step minimises
///   kd_weight * KL(P_teacher || P_student) + contrastive_weight * L_in_batch
/// averaged over the batch. After each epoch recall is measured on the first
/// validation_fraction of valid_qs and the best epoch by recall@selection_k is
/// returned (earlier epoch on ties).
TrainResult train(const TwoTowerStudent& initial, const OneTowerTeacher& teacher,
                  const Corpus& corpus, std::span<const Question> train_qs,
                  std::span<const Question> valid_qs, const MipsIndex& candidate_index,
                  const TrainConfig& config, std::size_t workers = 1);

/// Contrastive-only training with in-batch negatives; stands in for starting
/// from an already trained retriever. Returns the final parameters.
TwoTowerStudent pretrain_student(const TwoTowerStudent& initial, const Corpus& corpus,
                                 std::span<const Question> train_qs,
                                 const TrainConfig& config, TrainLog* log = nullptr);

}  // namespace retdistill
