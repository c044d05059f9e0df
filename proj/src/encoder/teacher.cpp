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

#include "encoder/teacher.hpp"

#include <cmath>
#include <random>

#include "common/error.hpp"

namespace retdistill {

RbfOracle::RbfOracle(double gamma, std::size_t latent_dim,
                     std::vector<double> passage_latents,
                     std::vector<double> question_latents)
    : gamma_(gamma),
      latent_dim_(latent_dim),
      passage_latents_(std::move(passage_latents)),
      question_latents_(std::move(question_latents)) {
  require(gamma_ >= 0.0 && std::isfinite(gamma_), "gamma must be finite and >= 0");
  require(latent_dim_ > 0, "latent dimension must be positive");
  require(passage_latents_.size() % latent_dim_ == 0 &&
              question_latents_.size() % latent_dim_ == 0,
          "latent buffers must be multiples of latent_dim");
}

std::span<const double> RbfOracle::passage_latent(std::int64_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= num_passages()) {
    fail(ErrorKind::kLookup, "no latent for passage " + std::to_string(id));
  }
  return {passage_latents_.data() + static_cast<std::size_t>(id) * latent_dim_,
          latent_dim_};
}

std::span<const double> RbfOracle::question_latent(std::int64_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= num_questions()) {
    fail(ErrorKind::kLookup, "no latent for question " + std::to_string(id));
  }
  return {question_latents_.data() + static_cast<std::size_t>(id) * latent_dim_,
          latent_dim_};
}

double RbfOracle::score(std::int64_t question_id, std::int64_t passage_id) const {
  const auto u = question_latent(question_id);
  const auto v = passage_latent(passage_id);
  double d2 = 0.0;
  for (std::size_t i = 0; i < latent_dim_; ++i) {
    const double diff = u[i] - v[i];
    d2 += diff * diff;
  }
  return std::exp(-gamma_ * d2);
}

JointMlp::JointMlp(FeatureExtractor features, Mlp net)
    : features_(features), net_(std::move(net)) {
  require(net_.input_dim() == 3 * features_.dim(),
          "joint scorer input must be three times the feature dimension");
  require(net_.output_dim() == 1, "joint scorer must emit a single score");
}

JointMlp JointMlp::create(std::size_t d_in, std::size_t hidden,
                          std::uint64_t seed, std::uint64_t feature_seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> widths{3 * d_in};
  if (hidden > 0) widths.push_back(hidden);
  widths.push_back(1);
  return JointMlp(FeatureExtractor(d_in, feature_seed), Mlp(widths, rng));
}

std::vector<double> JointMlp::concat(std::span<const double> qf,
                                     std::span<const double> pf) {
  std::vector<double> x(qf.begin(), qf.end());
  x.insert(x.end(), pf.begin(), pf.end());
  for (std::size_t i = 0; i < qf.size(); ++i) x.push_back(qf[i] * pf[i]);
  return x;
}

double JointMlp::score_features(std::span<const double> qf,
                                std::span<const double> pf) const {
  return net_.forward(concat(qf, pf))[0];
}

double JointMlp::score(const Question& q, const Passage& d) const {
  return score_features(features_.question(q), features_.passage(d));
}

double teacher_score(const OneTowerTeacher& teacher, const Question& q,
                     const Passage& d) {
  return std::visit([&](const auto& t) { return t.score(q, d); }, teacher);
}

std::vector<double> teacher_scores(const OneTowerTeacher& teacher,
                                   const Question& q,
                                   std::span<const Passage* const> candidates) {
  std::vector<double> out;
  out.reserve(candidates.size());
  if (const auto* joint = std::get_if<JointMlp>(&teacher)) {
    const auto qf = joint->features().question(q);
    for (const auto* d : candidates) {
      out.push_back(joint->score_features(qf, joint->features().passage(*d)));
    }
  } else {
    const auto& rbf = std::get<RbfOracle>(teacher);
    for (const auto* d : candidates) out.push_back(rbf.score(q, *d));
  }
  return out;
}

}  // namespace retdistill
