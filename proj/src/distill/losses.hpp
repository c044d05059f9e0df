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
#include <vector>

namespace retdistill {

/// Scores of one question against an ordered candidate list.
struct ScoreVector {
  std::vector<double> scores;
  std::vector<std::int64_t> passage_ids;
};

/// exp(z_i / T) / sum_j exp(z_j / T), computed after subtracting max(z).
std::vector<double> softmax_with_temperature(std::span<const double> z, double temperature);

/// sum_i p_i ln(p_i / q_i) with 0 ln(0 / q) = 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// KL(softmax(z_teacher / T) || softmax(z_student / T)). When grad is
/// non-empty it receives dLoss/dz_student = (P_student - P_teacher) / T.
double kd_loss(std::span<const double> z_teacher, std::span<const double> z_student,
               double temperature, std::span<double> grad = {});

/// -ln softmax(scores)[positive] at T = 1. grad (if non-empty) receives
/// softmax(scores) - onehot(positive).
double softmax_nll(std::span<const double> scores, std::size_t positive,
                   std::span<double> grad = {});

}  // namespace retdistill
