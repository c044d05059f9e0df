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

#include "distill/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "common/error.hpp"
#include "common/parallel.hpp"
#include "distill/objective.hpp"
#include "eval/metrics.hpp"

namespace retdistill {

std::string TrainLog::to_text() const {
  std::string out;
  char buf[256];
  for (const auto& s : steps) {
    std::snprintf(buf, sizeof buf, "step step=%zu kd_loss=%.10g contrastive_loss=%.10g lr=%.10g\n",
                  s.step, s.kd_loss, s.contrastive_loss, s.lr);
    out += buf;
  }
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof buf,
                  "epoch epoch=%zu step=%zu recall@1=%.10g recall@20=%.10g selection=%.10g\n",
                  e.epoch, e.step, e.recall_at_1, e.recall_at_20, e.selection_recall);
    out += buf;
  }
  return out;
}

std::vector<const Passage*> resolve_positives(std::span<const Question> questions,
                                              const Corpus& corpus) {
  std::vector<const Passage*> out(questions.size(), nullptr);
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& q = questions[i];
    if (!q.gold_passage_ids.empty()) {
      out[i] = &corpus.at(q.gold_passage_ids.front());
      continue;
    }
    if (q.answers.empty()) continue;
    for (const auto& p : corpus.passages) {
      if (contains_answer(p, q.answers)) {
        out[i] = &p;
        break;
      }
    }
  }
  return out;
}

namespace {

using Candidates = std::vector<std::vector<const Passage*>>;

Candidates retrieve_candidates(const TwoTowerStudent& retriever, const MipsIndex& index,
                               const Corpus& corpus, std::span<const Question> qs,
                               std::size_t k, std::size_t workers) {
  Candidates out(qs.size());
  parallel_for(qs.size(), workers, [&](std::size_t i) {
    const auto hits = index.search(retriever.embed_question(qs[i]), k);
    for (auto id : hits.ids) out[i].push_back(&corpus.at(id));
  });
  return out;
}

std::vector<std::vector<std::size_t>> make_batches(std::vector<std::size_t> order,
                                                   std::size_t batch_size,
                                                   std::mt19937_64& rng) {
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    batches.emplace_back(order.begin() + i,
                         order.begin() + std::min(order.size(), i + batch_size));
  }
  return batches;
}

// Mean of kd_weight * KD + contrastive_weight * in-batch NLL over one batch,
// then one optimizer step.
StepRecord train_batch(TwoTowerStudent& student, StudentOptimizer& opt,
                       const TrainConfig& config, std::span<const std::size_t> batch,
                       std::span<const Question> qs, const Candidates* candidates,
                       const std::vector<std::vector<double>>* teacher_z,
                       std::span<const Passage* const> positives) {
  StudentGradient grad(student);
  StepRecord rec;
  rec.lr = opt.current_rate();
  const double scale = 1.0 / static_cast<double>(batch.size());
  if (config.kd_weight > 0.0) {
    double kd = 0.0;
    for (auto i : batch) {
      kd += candidate_objective(student, qs[i], (*candidates)[i], (*teacher_z)[i],
                                std::nullopt, config.temperature, config.kd_weight, 0.0,
                                &grad, scale)
                .kd;
    }
    rec.kd_loss = kd * scale;
  }
  if (config.contrastive_weight > 0.0) {
    std::vector<const Question*> bq;
    std::vector<const Passage*> bp;
    for (auto i : batch) {
      if (positives[i] == nullptr) continue;
      bq.push_back(&qs[i]);
      bp.push_back(positives[i]);
    }
    if (bq.size() >= 2) {
      rec.contrastive_loss = in_batch_contrastive(student, bq, bp, &grad,
                                                  config.contrastive_weight);
    }
  }
  const double total =
      config.kd_weight * rec.kd_loss + config.contrastive_weight * rec.contrastive_loss;
  rec.step = opt.steps_taken() + 1;
  if (!std::isfinite(total)) {
    fail(ErrorKind::kNumeric, "non-finite loss at step " + std::to_string(rec.step));
  }
  opt.step(student, grad);
  return rec;
}

std::vector<std::size_t> trainable(std::span<const Question> qs,
                                   std::span<const Passage* const> positives,
                                   bool need_positive) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (!need_positive || positives[i] != nullptr) out.push_back(i);
  }
  return out;
}

}  // namespace

TrainResult train(const TwoTowerStudent& initial, const OneTowerTeacher& teacher,
                  const Corpus& corpus, std::span<const Question> train_qs,
                  std::span<const Question> valid_qs, const MipsIndex& candidate_index,
                  const TrainConfig& config, std::size_t workers) {
  config.validate();
  if (valid_qs.empty()) fail(ErrorKind::kConfig, "validation set is empty");
  if (train_qs.empty()) fail(ErrorKind::kConfig, "training set is empty");
  const auto n_valid = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(config.validation_fraction *
                                            static_cast<double>(valid_qs.size()))));
  const auto valid = valid_qs.first(std::min(n_valid, valid_qs.size()));

  TwoTowerStudent student = initial;
  StudentOptimizer opt(student, config);
  const auto positives = resolve_positives(train_qs, corpus);
  const bool kd = config.kd_weight > 0.0;
  const auto order = trainable(train_qs, positives, !kd);
  if (order.empty()) fail(ErrorKind::kConfig, "no trainable questions");

  Candidates candidates;
  std::vector<std::vector<double>> teacher_z(train_qs.size());
  auto load_candidates = [&](const TwoTowerStudent& retriever, const MipsIndex& index) {
    candidates = retrieve_candidates(retriever, index, corpus, train_qs,
                                     config.passages_per_question, workers);
    parallel_for(train_qs.size(), workers, [&](std::size_t i) {
      teacher_z[i] = teacher_scores(teacher, train_qs[i], candidates[i]);
    });
  };
  if (kd) load_candidates(initial, candidate_index);

  std::mt19937_64 rng(config.seed);
  TrainResult result{Checkpoint{initial, 0, 0.0}, initial, {}};
  bool have_best = false;
  const std::size_t sel_k = config.selection_k;
  std::vector<std::size_t> ks{1, 20};
  if (std::find(ks.begin(), ks.end(), sel_k) == ks.end()) ks.push_back(sel_k);
  std::sort(ks.begin(), ks.end());

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (kd && config.refresh_candidates && epoch > 1) {
      const auto fresh = build_flat(student.embed_corpus(corpus, workers));
      load_candidates(student, *fresh);
    }
    for (const auto& batch : make_batches(order, config.batch_size, rng)) {
      result.log.steps.push_back(train_batch(student, opt, config, batch, train_qs,
                                             &candidates, &teacher_z, positives));
    }
    const auto index = build_flat(student.embed_corpus(corpus, workers));
    const auto report = recall_at_k(*index, student, valid, corpus, ks, workers);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.step = opt.steps_taken();
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (ks[i] == 1) rec.recall_at_1 = report.recall[i];
      if (ks[i] == 20) rec.recall_at_20 = report.recall[i];
      if (ks[i] == sel_k) rec.selection_recall = report.recall[i];
    }
    result.log.epochs.push_back(rec);
    if (!have_best || rec.selection_recall > result.best.validation_recall) {
      result.best = Checkpoint{student, rec.step, rec.selection_recall};
      have_best = true;
    }
  }
  result.last = student;
  return result;
}

TwoTowerStudent pretrain_student(const TwoTowerStudent& initial, const Corpus& corpus,
                                 std::span<const Question> train_qs,
                                 const TrainConfig& config, TrainLog* log) {
  TrainConfig cfg = config;
  cfg.kd_weight = 0.0;
  if (cfg.contrastive_weight <= 0.0) cfg.contrastive_weight = 1.0;
  cfg.validate();
  const auto positives = resolve_positives(train_qs, corpus);
  const auto order = trainable(train_qs, positives, true);
  if (order.size() < 2) fail(ErrorKind::kConfig, "pretraining needs at least two questions with positives");
  TwoTowerStudent student = initial;
  StudentOptimizer opt(student, cfg);
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (const auto& batch : make_batches(order, cfg.batch_size, rng)) {
      auto rec = train_batch(student, opt, cfg, batch, train_qs, nullptr, nullptr, positives);
      if (log != nullptr) log->steps.push_back(rec);
    }
  }
  return student;
}

}  // namespace retdistill
