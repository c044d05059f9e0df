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

#include "distill/losses.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace retdistill {

namespace {

// log softmax(z / T), stabilised.
std::vector<double> log_softmax(std::span<const double> z, double temperature) {
  require(!z.empty(), "score vector is empty");
  double mx = z[0] / temperature;
  for (double v : z) mx = std::max(mx, v / temperature);
  double sum = 0.0;
  for (double v : z) sum += std::exp(v / temperature - mx);
  const double log_norm = mx + std::log(sum);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] / temperature - log_norm;
  return out;
}

}  // namespace

std::vector<double> softmax_with_temperature(std::span<const double> z,
                                             double temperature) {
  require(temperature > 0.0, "temperature must be > 0");
  require(!z.empty(), "score vector is empty");
  const double mx = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp((z[i] - mx) / temperature);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), "distribution length mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(0.0, kl);
}

double kd_loss(std::span<const double> z_teacher, std::span<const double> z_student,
               double temperature, std::span<double> grad) {
  require(temperature > 0.0, "temperature must be > 0");
  require(z_teacher.size() == z_student.size(), "score vector length mismatch");
  const auto lt = log_softmax(z_teacher, temperature);
  const auto ls = log_softmax(z_student, temperature);
  double loss = 0.0;
  for (std::size_t i = 0; i < lt.size(); ++i) {
    const double pt = std::exp(lt[i]);
    if (pt > 0.0) loss += pt * (lt[i] - ls[i]);
  }
  if (!grad.empty()) {
    require(grad.size() == z_student.size(), "gradient length mismatch");
    for (std::size_t i = 0; i < grad.size(); ++i) {
      grad[i] = (std::exp(ls[i]) - std::exp(lt[i])) / temperature;
    }
  }
  return loss;
}

double softmax_nll(std::span<const double> scores, std::size_t positive,
                   std::span<double> grad) {
  require(positive < scores.size(), "positive index out of range");
  const auto ls = log_softmax(scores, 1.0);
  if (!grad.empty()) {
    require(grad.size() == scores.size(), "gradient length mismatch");
    for (std::size_t i = 0; i < grad.size(); ++i) {
      grad[i] = std::exp(ls[i]) - (i == positive ? 1.0 : 0.0);
    }
  }
  return -ls[positive];
}

}  // namespace retdistill
