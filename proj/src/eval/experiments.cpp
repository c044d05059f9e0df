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

#include "eval/experiments.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "common/error.hpp"
#include "common/parallel.hpp"

namespace retdistill {

TrainConfig default_pretrain_config() {
  TrainConfig c;
  c.kd_weight = 0.0;
  c.contrastive_weight = 1.0;
  c.epochs = 10;
  return c;
}

AblationReport ablate_distillation(const SyntheticData& data, const AblationOptions& options) {
  const auto& corpus = data.corpus;
  const auto split = split_questions(data.questions, options.split.train, options.split.valid,
                                     options.seed);
  if (split.test.empty()) fail(ErrorKind::kConfig, "ablation test split is empty");
  const OneTowerTeacher teacher = data.teacher;

  const auto init = TwoTowerStudent::create(options.shape, options.seed);
  TrainConfig pre = options.pretrain;
  pre.seed = options.seed;
  const auto pretrained = pretrain_student(init, corpus, split.train, pre);
  const auto candidate_index = build_flat(pretrained.embed_corpus(corpus, options.workers));
  auto pre_report = recall_at_k(*candidate_index, pretrained, split.test, corpus,
                                options.k_values, options.workers);

  TrainConfig kd_cfg = options.finetune;
  kd_cfg.kd_weight = 1.0;
  kd_cfg.contrastive_weight = 0.0;
  kd_cfg.seed = options.seed;
  TrainConfig cl_cfg = options.finetune;
  cl_cfg.kd_weight = 0.0;
  cl_cfg.contrastive_weight = 1.0;
  cl_cfg.seed = options.seed;

  const TwoTowerStudent start_a = pretrained;
  const TwoTowerStudent start_b = pretrained;
  const bool shared = start_a == start_b;
  auto kd = train(start_a, teacher, corpus, split.train, split.valid, *candidate_index, kd_cfg,
                  options.workers);
  auto cl = train(start_b, teacher, corpus, split.train, split.valid, *candidate_index, cl_cfg,
                  options.workers);

  auto evaluate = [&](const TwoTowerStudent& s) {
    const auto index = build_flat(s.embed_corpus(corpus, options.workers));
    return recall_at_k(*index, s, split.test, corpus, options.k_values, options.workers);
  };
  auto kd_report = evaluate(kd.best.student);
  auto cl_report = evaluate(cl.best.student);
  std::vector<double> delta(options.k_values.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    delta[i] = kd_report.recall[i] - cl_report.recall[i];
  }
  return AblationReport{std::move(pre_report), std::move(kd_report), std::move(cl_report),
                        std::move(delta),      shared,               pretrained,
                        std::move(kd.best),    std::move(cl.best),   std::move(kd.log),
                        std::move(cl.log)};
}

std::vector<ReportRecord> ablation_records(const AblationReport& report, std::uint64_t seed) {
  std::vector<ReportRecord> out;
  auto add = [&](const RecallReport& r, const char* variant) {
    for (std::size_t i = 0; i < r.k_values.size(); ++i) {
      out.push_back({"recall", r.k_values[i], r.recall[i], r.n_questions, seed, variant});
    }
  };
  add(report.pretrained, "pretrained");
  add(report.distilled, "distilled");
  add(report.contrastive, "contrastive");
  const auto& ks = report.distilled.k_values;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    out.push_back({"recall_delta", ks[i], report.delta[i], report.distilled.n_questions, seed,
                   "distilled-contrastive"});
  }
  return out;
}

std::string negative_source_name(NegativeSource source) {
  return source == NegativeSource::kRandom ? "random" : "retrieved";
}

std::string negative_variant_name(const NegativeVariant& variant) {
  return negative_source_name(variant.source) + "-" + std::to_string(variant.count);
}

namespace {

bool is_answer_passage(const Question& q, const Passage& p) {
  if (std::find(q.gold_passage_ids.begin(), q.gold_passage_ids.end(), p.id) !=
      q.gold_passage_ids.end()) {
    return true;
  }
  return !q.answers.empty() && contains_answer(p, q.answers);
}

// Non-answer passages among the retriever's top results, best first.
std::vector<const Passage*> retrieved_negatives(const MipsIndex& index,
                                                const TwoTowerStudent& student,
                                                const Corpus& corpus, const Question& q,
                                                std::size_t count) {
  std::vector<const Passage*> out;
  std::size_t k = count + 1;
  while (true) {
    out.clear();
    const auto hits = index.search(student.embed_question(q), k);
    for (auto id : hits.ids) {
      const auto& p = corpus.at(id);
      if (!is_answer_passage(q, p)) out.push_back(&p);
      if (out.size() == count) return out;
    }
    if (hits.ids.size() < k) return out;
    k *= 2;
  }
}

std::vector<const Passage*> random_negatives(const Corpus& corpus, const Question& q,
                                             std::size_t count, std::mt19937_64& rng) {
  std::vector<const Passage*> out;
  std::unordered_set<std::int64_t> used;
  std::uniform_int_distribution<std::size_t> pick(0, corpus.passages.size() - 1);
  std::size_t eligible = 0;
  for (const auto& p : corpus.passages) eligible += is_answer_passage(q, p) ? 0 : 1;
  count = std::min(count, eligible);
  while (out.size() < count) {
    const auto& p = corpus.passages[pick(rng)];
    if (is_answer_passage(q, p) || !used.insert(p.id).second) continue;
    out.push_back(&p);
  }
  return out;
}

}  // namespace

std::vector<NegativeCurve> negative_sampling_study(const Corpus& corpus,
                                                   std::span<const Question> train_qs,
                                                   std::span<const Question> eval_qs,
                                                   const MipsIndex& index,
                                                   const TwoTowerStudent& student,
                                                   const NegativeStudyOptions& options) {
  require(!options.variants.empty(), "negative study needs at least one variant");
  const auto positives = resolve_positives(train_qs, corpus);
  const auto ks = options.k_values.empty() ? default_sweep_grid(corpus.passages.size())
                                           : options.k_values;
  std::vector<NegativeCurve> out;
  for (const auto& variant : options.variants) {
    require(variant.count >= 1, "negative count must be >= 1");
    std::mt19937_64 rng(options.seed);
    std::vector<ReaderItem> items;
    for (std::size_t i = 0; i < train_qs.size(); ++i) {
      if (positives[i] == nullptr) continue;
      ReaderItem item{&train_qs[i], positives[i], {}};
      item.negatives = variant.source == NegativeSource::kRandom
                           ? random_negatives(corpus, train_qs[i], variant.count, rng)
                           : retrieved_negatives(index, student, corpus, train_qs[i],
                                                 variant.count);
      if (!item.negatives.empty()) items.push_back(std::move(item));
    }
    if (items.empty()) fail(ErrorKind::kConfig, "negative study has no trainable questions");
    const auto reader = JointMlp::create(student.features().dim(), options.reader_hidden,
                                         options.seed, student.features().seed());
    TrainConfig cfg = options.reader;
    cfg.seed = options.seed;
    auto trained = train_joint_reader(reader, items, cfg);
    const OneTowerTeacher teacher = trained.reader;
    out.push_back({variant,
                   sweep_k(index, student, teacher, eval_qs, corpus, ks, options.workers),
                   std::move(trained.losses), std::move(trained.reader)});
  }
  return out;
}

std::vector<ReportRecord> negative_study_records(std::span<const NegativeCurve> curves,
                                                 std::uint64_t seed) {
  std::vector<ReportRecord> out;
  for (const auto& c : curves) {
    const auto name = negative_variant_name(c.variant);
    for (const auto& p : c.curve) {
      out.push_back({"accuracy", p.k, p.accuracy, 0, seed, name});
    }
  }
  return out;
}

FinetuneReaderReport finetune_reader_after_swap(const JointMlp& reader, const Corpus& corpus,
                                                std::span<const Question> train_qs,
                                                std::span<const Question> eval_qs,
                                                const MipsIndex& index,
                                                const TwoTowerStudent& student,
                                                const FinetuneReaderOptions& options) {
  require(options.k >= 1 && options.negatives >= 1, "finetune-reader needs k >= 1 and negatives >= 1");
  const auto positives = resolve_positives(train_qs, corpus);
  std::vector<ReaderItem> items;
  for (std::size_t i = 0; i < train_qs.size(); ++i) {
    if (positives[i] == nullptr) continue;
    ReaderItem item{&train_qs[i], positives[i], {}};
    item.negatives = retrieved_negatives(index, student, corpus, train_qs[i],
                                         std::min(options.negatives, options.k));
    if (!item.negatives.empty()) items.push_back(std::move(item));
  }
  if (items.empty()) fail(ErrorKind::kConfig, "finetune-reader has no trainable questions");

  const OneTowerTeacher before = reader;
  const auto acc_before =
      end_to_end_accuracy(index, student, before, eval_qs, corpus, options.k, options.workers);
  TrainConfig cfg = options.reader;
  cfg.seed = options.seed;
  auto trained = train_joint_reader(reader, items, cfg);
  const OneTowerTeacher after = trained.reader;
  const auto acc_after =
      end_to_end_accuracy(index, student, after, eval_qs, corpus, options.k, options.workers);
  return FinetuneReaderReport{std::move(trained.reader), acc_before.accuracy,
                              acc_after.accuracy, acc_after.retrieval_recall,
                              std::move(trained.losses)};
}

}  // namespace retdistill
