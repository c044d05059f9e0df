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

#include "encoder/reader.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "common/error.hpp"
#include "distill/losses.hpp"
#include "distill/optimizer.hpp"

namespace retdistill {

double reader_cross_entropy(const JointMlp& reader, const ReaderItem& item,
                            std::span<double> grad) {
  require(item.question != nullptr && item.positive != nullptr, "reader item is incomplete");
  require(!item.negatives.empty(), "reader item needs at least one negative");
  const auto& fx = reader.features();
  const auto qf = fx.question(*item.question);
  const std::size_t n = item.negatives.size() + 1;
  std::vector<std::vector<double>> inputs;
  inputs.reserve(n);
  inputs.push_back(JointMlp::concat(qf, fx.passage(*item.positive)));
  for (const auto* neg : item.negatives) inputs.push_back(JointMlp::concat(qf, fx.passage(*neg)));

  std::vector<Mlp::Trace> traces(grad.empty() ? 0 : n);
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = grad.empty() ? reader.net().forward(inputs[i])[0]
                             : reader.net().forward(inputs[i], traces[i])[0];
  }
  std::vector<double> dz(grad.empty() ? 0 : n);
  const double loss = softmax_nll(scores, 0, dz);
  if (!grad.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      const double g = dz[i];
      reader.net().backward(traces[i], {&g, 1}, grad);
    }
  }
  return loss;
}

TrainConfig default_reader_config() {
  TrainConfig c;
  c.kd_weight = 0.0;
  c.contrastive_weight = 1.0;
  c.temperature = 1.0;
  c.learning_rate = 1e-3;
  c.epochs = 4;
  c.batch_size = 10;
  c.warmup_steps = 20;
  return c;
}

ReaderTrainResult train_joint_reader(const JointMlp& reader, std::span<const ReaderItem> items,
                                     const TrainConfig& config) {
  require(!items.empty(), "reader training needs at least one item");
  require(config.batch_size >= 1 && config.learning_rate > 0.0, "invalid reader config");
  ReaderTrainResult result{reader, {}};
  auto& net = result.reader.net();
  AdamW opt(net.num_params(), config);
  std::vector<double> grad(net.num_params());
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t end = std::min(order.size(), b + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss = 0.0;
      for (std::size_t i = b; i < end; ++i) loss += reader_cross_entropy(result.reader, items[order[i]], grad);
      const double scale = 1.0 / static_cast<double>(end - b);
      loss *= scale;
      if (!std::isfinite(loss)) {
        fail(ErrorKind::kNumeric,
             "non-finite reader loss at step " + std::to_string(result.losses.size() + 1));
      }
      for (auto& g : grad) g *= scale;
      opt.step(net.params(), grad);
      result.losses.push_back(loss);
    }
  }
  return result;
}

}  // namespace retdistill
