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

#include "distill/config.hpp"

namespace retdistill {

/// Adam with decoupled weight decay and a linear warmup to the base rate,
/// constant afterwards.
class AdamW {
 public:
  AdamW(std::size_t num_params, const TrainConfig& config);

  /// Rate that the next call to step() will use.
  double current_rate() const;
  std::size_t steps_taken() const { return t_; }

  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, beta1_, beta2_, eps_, weight_decay_;
  std::size_t warmup_;
  std::size_t t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace retdistill
