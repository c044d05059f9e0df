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

#include "encoder/student.hpp"

#include <random>

#include "common/error.hpp"
#include "common/parallel.hpp"

namespace retdistill {

TwoTowerStudent::TwoTowerStudent(FeatureExtractor features, Mlp question_map,
                                 Mlp passage_map)
    : features_(features),
      question_map_(std::move(question_map)),
      passage_map_(std::move(passage_map)) {
  require(question_map_.input_dim() == features_.dim() &&
              passage_map_.input_dim() == features_.dim(),
          "tower input width must equal the feature dimension");
  require(question_map_.output_dim() == passage_map_.output_dim(),
          "towers must emit the same embedding dimension");
}

TwoTowerStudent TwoTowerStudent::create(const StudentShape& shape,
                                        std::uint64_t seed) {
  std::vector<std::size_t> widths{shape.d_in};
  if (shape.hidden > 0) widths.push_back(shape.hidden);
  widths.push_back(shape.d_emb);
  std::mt19937_64 rng(seed);
  Mlp q(widths, rng);
  // Both towers start from the same draw, like two encoders initialised from
  // one checkpoint; they are trained independently afterwards.
  Mlp p = q;
  return TwoTowerStudent(FeatureExtractor(shape.d_in, shape.feature_seed),
                         std::move(q), std::move(p));
}

Embedding TwoTowerStudent::embed_question(const Question& q) const {
  return question_map_.forward(features_.question(q));
}

Embedding TwoTowerStudent::embed_passage(const Passage& d) const {
  return passage_map_.forward(features_.passage(d));
}

double TwoTowerStudent::score(const Question& q, const Passage& d) const {
  return dot(embed_question(q), embed_passage(d));
}

EmbeddingMatrix TwoTowerStudent::embed_corpus(const Corpus& corpus,
                                              std::size_t workers) const {
  EmbeddingMatrix out(corpus.size(), d_emb());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    const auto e = embed_passage(corpus.passages[i]);
    std::copy(e.begin(), e.end(), out.row(i).begin());
  });
  return out;
}

EmbeddingMatrix TwoTowerStudent::embed_questions(std::span<const Question> qs,
                                                 std::size_t workers) const {
  EmbeddingMatrix out(qs.size(), d_emb());
  parallel_for(qs.size(), workers, [&](std::size_t i) {
    const auto e = embed_question(qs[i]);
    std::copy(e.begin(), e.end(), out.row(i).begin());
  });
  return out;
}

bool TwoTowerStudent::parameters_finite() const {
  return all_finite(question_map_.params()) && all_finite(passage_map_.params());
}

}  // namespace retdistill
