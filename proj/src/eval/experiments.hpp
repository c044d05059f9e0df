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
#include "corpus/synthetic.hpp"
#include "distill/config.hpp"
#include "distill/trainer.hpp"
#include "encoder/reader.hpp"
#include "encoder/student.hpp"
#include "encoder/teacher.hpp"
#include "eval/metrics.hpp"
#include "eval/pipeline.hpp"
#include "index/mips_index.hpp"

namespace retdistill {

/// Question split used by every experiment.
struct SplitFractions {
  double train = 0.6;
  double valid = 0.1;
};

struct AblationOptions {
  StudentShape shape;
  std::uint64_t seed = 0;
  SplitFractions split;
  // Contrastive pretraining that produces the shared starting point.
  TrainConfig pretrain;
  // Finetuning config shared by both arms; the arms differ only in the loss
  // weights (kd arm: kd=1, contrastive=0; baseline: kd=0, contrastive=1).
  TrainConfig finetune;
  std::vector<std::size_t> k_values{1, 20, 50, 100};
  std::size_t workers = 1;
};

/// Pretrain settings used when none are supplied: contrastive, 10 epochs.
TrainConfig default_pretrain_config();

struct AblationReport {
  RecallReport pretrained;
  RecallReport distilled;
  RecallReport contrastive;
  std::vector<double> delta;  // distilled - contrastive, per k
  bool shared_start = false;
  TwoTowerStudent pretrained_student;
  Checkpoint distilled_checkpoint;
  Checkpoint contrastive_checkpoint;
  TrainLog distilled_log;
  TrainLog contrastive_log;
};

/// Pretrains one student, then finetunes two copies from the same parameters:
/// one with the distillation loss, one with contrastive loss only. Recall is
/// measured on the test split.
AblationReport ablate_distillation(const SyntheticData& data, const AblationOptions& options);

std::vector<ReportRecord> ablation_records(const AblationReport& report, std::uint64_t seed);

enum class NegativeSource { kRandom, kRetrieved };

std::string negative_source_name(NegativeSource source);

struct NegativeVariant {
  NegativeSource source = NegativeSource::kRandom;
  std::size_t count = 23;
};

/// "<source>-<count>", e.g. "retrieved-23".
std::string negative_variant_name(const NegativeVariant& variant);

struct NegativeStudyOptions {
  std::vector<NegativeVariant> variants{{NegativeSource::kRandom, 23},
                                        {NegativeSource::kRandom, 67},
                                        {NegativeSource::kRetrieved, 23},
                                        {NegativeSource::kRetrieved, 67}};
  std::size_t reader_hidden = 64;
  std::uint64_t seed = 0;
  TrainConfig reader = default_reader_config();
  std::vector<std::size_t> k_values;  // empty: default grid
  std::size_t workers = 1;
};

struct NegativeCurve {
  NegativeVariant variant;
  std::vector<CurvePoint> curve;
  std::vector<double> losses;
  JointMlp reader;
};

/// Trains one joint reader per variant on train_qs (negatives drawn uniformly
/// from the corpus or from the retriever's top passages) and sweeps k over
/// eval_qs with that reader re-ranking the retriever's output.
std::vector<NegativeCurve> negative_sampling_study(const Corpus& corpus,
                                                   std::span<const Question> train_qs,
                                                   std::span<const Question> eval_qs,
                                                   const MipsIndex& index,
                                                   const TwoTowerStudent& student,
                                                   const NegativeStudyOptions& options);

std::vector<ReportRecord> negative_study_records(std::span<const NegativeCurve> curves,
                                                 std::uint64_t seed);

struct FinetuneReaderOptions {
  std::size_t k = 20;
  std::size_t negatives = 23;
  std::uint64_t seed = 0;
  TrainConfig reader = default_reader_config();
  std::size_t workers = 1;
};

struct FinetuneReaderReport {
  JointMlp finetuned;
  double accuracy_before = 0.0;
  double accuracy_after = 0.0;
  double retrieval_recall = 0.0;
  std::vector<double> losses;
};

/// Continues training a joint reader on the new retriever's top-k passages
/// for train_qs and reports end-to-end accuracy at k on eval_qs before and
/// after.
FinetuneReaderReport finetune_reader_after_swap(const JointMlp& reader, const Corpus& corpus,
                                                std::span<const Question> train_qs,
                                                std::span<const Question> eval_qs,
                                                const MipsIndex& index,
                                                const TwoTowerStudent& student,
                                                const FinetuneReaderOptions& options);

}  // namespace retdistill
