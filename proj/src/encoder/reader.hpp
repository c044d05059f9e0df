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
#include <vector>

#include "corpus/corpus.hpp"
#include "distill/config.hpp"
#include "encoder/teacher.hpp"

namespace retdistill {

/// One training example for a joint reader: the positive must outrank every
/// negative.
struct ReaderItem {
  const Question* question = nullptr;
  const Passage* positive = nullptr;
  std::vector<const Passage*> negatives;
};

/// Softmax cross-entropy of the positive over {positive} U negatives, scored
/// by the reader. Adds dLoss/dparams to grad when it is non-empty.
double reader_cross_entropy(const JointMlp& reader, const ReaderItem& item,
                            std::span<double> grad = {});

struct ReaderTrainResult {
  JointMlp reader;
  std::vector<double> losses;  // mean batch loss per step
};

/// AdamW over mini-batches of batch_size items, reshuffled every epoch with
/// config.seed. Uses learning_rate, weight_decay, betas, epsilon,
/// warmup_steps, epochs and batch_size from config; the loss weights are
/// ignored. Throws a numeric error on a non-finite loss.
ReaderTrainResult train_joint_reader(const JointMlp& reader, std::span<const ReaderItem> items,
                                     const TrainConfig& config);

/// Reader training defaults: lr 1e-3, 4 epochs, batch 10, warmup 20.
TrainConfig default_reader_config();

}  // namespace retdistill
