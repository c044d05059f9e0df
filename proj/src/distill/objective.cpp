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

#include "distill/objective.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "distill/losses.hpp"

namespace retdistill {

void StudentGradient::clear() {
  std::fill(question_map.begin(), question_map.end(), 0.0);
  std::fill(passage_map.begin(), passage_map.end(), 0.0);
}

bool StudentGradient::finite() const {
  return all_finite(question_map) && all_finite(passage_map);
}

namespace {

struct Encoded {
  Mlp::Trace trace;
  Embedding emb;
};

Encoded encode_question(const TwoTowerStudent& s, const Question& q) {
  Encoded e;
  e.emb = s.question_map().forward(s.features().question(q), e.trace);
  return e;
}

Encoded encode_passage(const TwoTowerStudent& s, const Passage& d) {
  Encoded e;
  e.emb = s.passage_map().forward(s.features().passage(d), e.trace);
  return e;
}

// Backpropagates dL/dz where z_ij = psi_i . phi_j.
void backprop_scores(const TwoTowerStudent& s, std::span<const Encoded> questions,
                     std::span<const Encoded> passages,
                     const std::vector<std::vector<double>>& dz, StudentGradient& grad) {
  const std::size_t d = s.d_emb();
  std::vector<std::vector<double>> dphi(passages.size(), std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < questions.size(); ++i) {
    std::vector<double> dpsi(d, 0.0);
    for (std::size_t j = 0; j < passages.size(); ++j) {
      const double g = dz[i][j];
      if (g == 0.0) continue;
      for (std::size_t c = 0; c < d; ++c) {
        dpsi[c] += g * passages[j].emb[c];
        dphi[j][c] += g * questions[i].emb[c];
      }
    }
    s.question_map().backward(questions[i].trace, dpsi, grad.question_map);
  }
  for (std::size_t j = 0; j < passages.size(); ++j) {
    s.passage_map().backward(passages[j].trace, dphi[j], grad.passage_map);
  }
}

}  // namespace

LossTerms candidate_objective(const TwoTowerStudent& student, const Question& q,
                              std::span<const Passage* const> candidates,
                              std::span<const double> teacher_scores,
                              std::optional<std::size_t> positive, double temperature,
                              double kd_weight, double contrastive_weight,
                              StudentGradient* grad, double grad_scale) {
  require(candidates.size() >= 2, "a distillation step needs at least two candidates");
  const bool use_kd = kd_weight > 0.0;
  const bool use_cl = contrastive_weight > 0.0 && positive.has_value();
  if (use_kd) {
    require(teacher_scores.size() == candidates.size(),
            "teacher score vector length mismatch");
  }
  std::vector<Encoded> qs{encode_question(student, q)};
  std::vector<Encoded> ps;
  ps.reserve(candidates.size());
  std::vector<double> z(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ps.push_back(encode_passage(student, *candidates[i]));
    z[i] = dot(qs[0].emb, ps.back().emb);
  }
  LossTerms terms;
  std::vector<std::vector<double>> dz(1, std::vector<double>(z.size(), 0.0));
  std::vector<double> g(z.size());
  if (use_kd) {
    terms.kd = kd_loss(teacher_scores, z, temperature, g);
    for (std::size_t i = 0; i < z.size(); ++i) dz[0][i] += kd_weight * grad_scale * g[i];
  }
  if (use_cl) {
    terms.contrastive = softmax_nll(z, *positive, g);
    for (std::size_t i = 0; i < z.size(); ++i) {
      dz[0][i] += contrastive_weight * grad_scale * g[i];
    }
  }
  if (grad != nullptr) backprop_scores(student, qs, ps, dz, *grad);
  return terms;
}

double contrastive_loss(const TwoTowerStudent& student, const Question& q,
                        const Passage& positive, std::span<const Passage* const> negatives,
                        StudentGradient* grad) {
  require(!negatives.empty(), "contrastive loss needs at least one negative");
  std::vector<const Passage*> cands{&positive};
  cands.insert(cands.end(), negatives.begin(), negatives.end());
  return candidate_objective(student, q, cands, {}, 0, 1.0, 0.0, 1.0, grad).contrastive;
}

double in_batch_contrastive(const TwoTowerStudent& student,
                            std::span<const Question* const> questions,
                            std::span<const Passage* const> positives,
                            StudentGradient* grad, double grad_scale) {
  require(questions.size() == positives.size(), "one positive per question is required");
  require(questions.size() >= 2, "in-batch negatives need a batch of at least two");
  const std::size_t b = questions.size();
  std::vector<Encoded> qs, ps;
  for (const auto* q : questions) qs.push_back(encode_question(student, *q));
  for (const auto* p : positives) ps.push_back(encode_passage(student, *p));
  std::vector<std::vector<double>> dz(b, std::vector<double>(b, 0.0));
  double total = 0.0;
  std::vector<double> z(b), g(b);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) z[j] = dot(qs[i].emb, ps[j].emb);
    total += softmax_nll(z, i, g);
    for (std::size_t j = 0; j < b; ++j) dz[i][j] = g[j] * grad_scale / static_cast<double>(b);
  }
  if (grad != nullptr) backprop_scores(student, qs, ps, dz, *grad);
  return total / static_cast<double>(b);
}

StudentOptimizer::StudentOptimizer(const TwoTowerStudent& student, const TrainConfig& config)
    : question_opt_(student.question_map().num_params(), config),
      passage_opt_(student.passage_map().num_params(), config) {}

void StudentOptimizer::step(TwoTowerStudent& student, const StudentGradient& grad) {
  if (!grad.finite()) {
    fail(ErrorKind::kNumeric,
         "non-finite gradient at step " + std::to_string(steps_taken() + 1));
  }
  question_opt_.step(student.question_map().params(), grad.question_map);
  passage_opt_.step(student.passage_map().params(), grad.passage_map);
}

std::optional<std::size_t> find_positive(const Question& q,
                                         std::span<const Passage* const> candidates) {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (std::find(q.gold_passage_ids.begin(), q.gold_passage_ids.end(), candidates[i]->id) !=
        q.gold_passage_ids.end()) {
      return i;
    }
  }
  if (q.answers.empty()) return std::nullopt;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (contains_answer(*candidates[i], q.answers)) return i;
  }
  return std::nullopt;
}

DistillStepResult distill_step(TwoTowerStudent& student, StudentOptimizer& optimizer,
                               const OneTowerTeacher& teacher, const Question& q,
                               std::span<const Passage* const> candidates,
                               const TrainConfig& config) {
  std::vector<double> zt;
  if (config.kd_weight > 0.0) zt = teacher_scores(teacher, q, candidates);
  StudentGradient grad(student);
  const auto terms = candidate_objective(
      student, q, candidates, zt, find_positive(q, candidates), config.temperature,
      config.kd_weight, config.contrastive_weight, &grad);
  DistillStepResult r;
  r.kd_loss = terms.kd;
  r.contrastive_loss = terms.contrastive;
  r.total = config.kd_weight * terms.kd + config.contrastive_weight * terms.contrastive;
  r.rate = optimizer.current_rate();
  if (!std::isfinite(r.total)) {
    fail(ErrorKind::kNumeric, "non-finite loss at step " +
                                  std::to_string(optimizer.steps_taken() + 1) +
                                  " (question " + std::to_string(q.id) + ")");
  }
  optimizer.step(student, grad);
  return r;
}

}  // namespace retdistill
