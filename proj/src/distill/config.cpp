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

#include "distill/config.hpp"

#include <cmath>

#include "common/error.hpp"

namespace retdistill {

void TrainConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::kConfig, what); };
  if (!(temperature > 0.0) || !std::isfinite(temperature)) bad("temperature must be > 0");
  if (kd_weight < 0.0 || contrastive_weight < 0.0) bad("loss weights must be >= 0");
  if (kd_weight == 0.0 && contrastive_weight == 0.0) bad("kd_weight and contrastive_weight are both 0");
  if (!(learning_rate > 0.0)) bad("learning_rate must be > 0");
  if (weight_decay < 0.0) bad("weight_decay must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) bad("betas must lie in [0, 1)");
  if (batch_size == 0) bad("batch_size must be positive");
  if (passages_per_question < 2) bad("passages_per_question must be >= 2");
  if (!(validation_fraction > 0.0 && validation_fraction <= 1.0)) bad("validation_fraction must lie in (0, 1]");
  if (selection_k == 0) bad("selection_k must be positive");
}

}  // namespace retdistill
