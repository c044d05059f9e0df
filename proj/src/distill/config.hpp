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
#include <string>

namespace retdistill {

struct TrainConfig {
  double temperature = 3.0;
  double kd_weight = 1.0;
  double contrastive_weight = 0.0;
  // Desk-scale rate; see README for the relation to the 1e-5 used with
  // pretrained transformer encoders.
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t warmup_steps = 100;
  std::size_t epochs = 16;
  std::size_t batch_size = 10;
  std::size_t passages_per_question = 16;
  double validation_fraction = 1.0;
  // Checkpoint selection metric is recall@selection_k.
  std::size_t selection_k = 1;
  // Re-retrieve candidates with the current student at every epoch instead of
  // using the frozen initial retriever.
  bool refresh_candidates = false;
  std::uint64_t seed = 0;

  /// Throws a configuration error on invalid combinations.
  void validate() const;
};

}  // namespace retdistill
