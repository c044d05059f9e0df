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
#include <variant>
#include <vector>

#include "corpus/corpus.hpp"
#include "encoder/features.hpp"
#include "encoder/mlp.hpp"

namespace retdistill {

/// exp(-gamma * |u_q - v_d|^2) over hidden latents indexed by question and
/// passage id.
class RbfOracle {
 public:
  RbfOracle(double gamma, std::size_t latent_dim,
            std::vector<double> passage_latents,
            std::vector<double> question_latents);

  double gamma() const { return gamma_; }
  std::size_t latent_dim() const { return latent_dim_; }
  std::size_t num_passages() const { return passage_latents_.size() / latent_dim_; }
  std::size_t num_questions() const { return question_latents_.size() / latent_dim_; }
  std::span<const double> passage_latent(std::int64_t id) const;
  std::span<const double> question_latent(std::int64_t id) const;
  const std::vector<double>& passage_latents() const { return passage_latents_; }
  const std::vector<double>& question_latents() const { return question_latents_; }

  double score(std::int64_t question_id, std::int64_t passage_id) const;
  double score(const Question& q, const Passage& d) const {
    return score(q.id, d.id);
  }

  bool operator==(const RbfOracle&) const = default;

 private:
  double gamma_;
  std::size_t latent_dim_;
  std::vector<double> passage_latents_;
  std::vector<double> question_latents_;
};

/// One-tower scorer over the joint input [f(q); f(d); f(q) * f(d)]. The
/// elementwise product block gives the network direct access to term overlap,
/// which a plain concatenation only reaches through the hidden nonlinearity.
class JointMlp {
 public:
  JointMlp(FeatureExtractor features, Mlp net);

  static JointMlp create(std::size_t d_in, std::size_t hidden,
                         std::uint64_t seed, std::uint64_t feature_seed = 0);

  const FeatureExtractor& features() const { return features_; }
  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }

  /// Joint input of width 3 * features().dim().
  static std::vector<double> concat(std::span<const double> qf,
                                    std::span<const double> pf);

  double score(const Question& q, const Passage& d) const;
  double score_features(std::span<const double> qf, std::span<const double> pf) const;

  bool operator==(const JointMlp&) const = default;

 private:
  FeatureExtractor features_;
  Mlp net_;
};

using OneTowerTeacher = std::variant<RbfOracle, JointMlp>;

double teacher_score(const OneTowerTeacher& teacher, const Question& q,
                     const Passage& d);

/// Scores every candidate for one question; JointMlp reuses the question
/// features across candidates.
std::vector<double> teacher_scores(const OneTowerTeacher& teacher,
                                   const Question& q,
                                   std::span<const Passage* const> candidates);

}  // namespace retdistill
