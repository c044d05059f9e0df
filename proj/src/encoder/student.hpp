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

#include "common/linalg.hpp"
#include "corpus/corpus.hpp"
#include "encoder/features.hpp"
#include "encoder/mlp.hpp"

namespace retdistill {

struct StudentShape {
  std::size_t d_in = FeatureExtractor::kDefaultDim;
  // 0: one affine layer per tower; otherwise affine-tanh-affine.
  std::size_t hidden = 0;
  std::size_t d_emb = 32;
  std::uint64_t feature_seed = 0;
};

/// Two independent towers: question_map (psi) and passage_map (phi). A pair is
/// scored by the inner product of the two embeddings.
class TwoTowerStudent {
 public:
  TwoTowerStudent(FeatureExtractor features, Mlp question_map, Mlp passage_map);

  static TwoTowerStudent create(const StudentShape& shape, std::uint64_t seed);

  std::size_t d_emb() const { return question_map_.output_dim(); }
  const FeatureExtractor& features() const { return features_; }
  const Mlp& question_map() const { return question_map_; }
  const Mlp& passage_map() const { return passage_map_; }
  Mlp& question_map() { return question_map_; }
  Mlp& passage_map() { return passage_map_; }

  Embedding embed_question(const Question& q) const;
  Embedding embed_passage(const Passage& d) const;
  double score(const Question& q, const Passage& d) const;

  EmbeddingMatrix embed_corpus(const Corpus& corpus, std::size_t workers = 1) const;
  EmbeddingMatrix embed_questions(std::span<const Question> qs,
                                  std::size_t workers = 1) const;

  bool parameters_finite() const;
  bool operator==(const TwoTowerStudent&) const = default;

 private:
  FeatureExtractor features_;
  Mlp question_map_;
  Mlp passage_map_;
};

}  // namespace retdistill
