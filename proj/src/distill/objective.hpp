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
#include <optional>
#include <span>
#include <vector>

#include "corpus/corpus.hpp"
#include "distill/config.hpp"
#include "distill/optimizer.hpp"
#include "encoder/student.hpp"
#include "encoder/teacher.hpp"

namespace retdistill {

/// Parameter gradient of a TwoTowerStudent, laid out like the two towers.
struct StudentGradient {
  std::vector<double> question_map;
  std::vector<double> passage_map;

  explicit StudentGradient(const TwoTowerStudent& student)
      : question_map(student.question_map().num_params(), 0.0),
        passage_map(student.passage_map().num_params(), 0.0) {}

  void clear();
  bool finite() const;
};

struct LossTerms {
  double kd = 0.0;
  double contrastive = 0.0;
};

/// One question against an ordered candidate list:
///   kd_weight * KL(P_teacher || P_student) + contrastive_weight * NLL(positive)
/// where the student scores are psi(q).phi(d_i) and teacher_scores are
/// constants. The contrastive term is skipped when positive is empty. If grad
/// is non-null the weighted gradient, multiplied by grad_scale, is added to it.
LossTerms candidate_objective(const TwoTowerStudent& student, const Question& q,
                              std::span<const Passage* const> candidates,
                              std::span<const double> teacher_scores,
                              std::optional<std::size_t> positive, double temperature,
                              double kd_weight, double contrastive_weight,
                              StudentGradient* grad = nullptr, double grad_scale = 1.0);

/// -ln softmax over {positive} U negatives at T = 1.
double contrastive_loss(const TwoTowerStudent& student, const Question& q,
                        const Passage& positive, std::span<const Passage* const> negatives,
                        StudentGradient* grad = nullptr);

/// In-batch negatives: question i is scored against every positive in the
/// batch and positives[i] is its target. Returns the mean loss; the gradient
/// of the mean (times grad_scale) is accumulated.
double in_batch_contrastive(const TwoTowerStudent& student,
                            std::span<const Question* const> questions,
                            std::span<const Passage* const> positives,
                            StudentGradient* grad = nullptr, double grad_scale = 1.0);

/// AdamW state for both towers.
class StudentOptimizer {
 public:
  StudentOptimizer(const TwoTowerStudent& student, const TrainConfig& config);

  double current_rate() const { return question_opt_.current_rate(); }
  std::size_t steps_taken() const { return question_opt_.steps_taken(); }

  /// Throws a numeric error if the gradient is not finite.
  void step(TwoTowerStudent& student, const StudentGradient& grad);

 private:
  AdamW question_opt_;
  AdamW passage_opt_;
};

/// Index of the gold passage among candidates, falling back to the first
/// answer-bearing candidate.
std::optional<std::size_t> find_positive(const Question& q,
                                         std::span<const Passage* const> candidates);

struct DistillStepResult {
  double kd_loss = 0.0;
  double contrastive_loss = 0.0;
  double total = 0.0;
  double rate = 0.0;
};

/// Scores the candidates with student and teacher, evaluates the weighted
/// loss and applies one optimizer update.
DistillStepResult distill_step(TwoTowerStudent& student, StudentOptimizer& optimizer,
                               const OneTowerTeacher& teacher, const Question& q,
                               std::span<const Passage* const> candidates,
                               const TrainConfig& config);

}  // namespace retdistill
