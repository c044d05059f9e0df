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
#include <vector>

#include "corpus/corpus.hpp"
#include "encoder/teacher.hpp"

namespace retdistill {

/// Knobs of the planted-latent generator. Each latent coordinate is written
/// into the text as interpolated counts of two neighbouring bin tokens
/// ("z<dim>b<bin>"), so the bag of words carries a quantized copy of the
/// latent. Everything else is filler drawn from a fixed vocabulary.
struct SyntheticOptions {
  double question_noise = 0.05;
  double gamma = 1.0;
  std::size_t bins = 12;
  double latent_range = 3.0;
  std::size_t passage_tokens_per_dim = 6;
  std::size_t question_tokens_per_dim = 4;
  std::size_t filler_vocab = 1000;
  std::size_t question_filler = 6;
  // Passages are padded with filler up to this many tokens (<= chunk_size).
  std::size_t passage_length = 64;
  std::size_t chunk_size = kDefaultChunkSize;
};

struct SyntheticData {
  Corpus corpus;
  std::vector<Question> questions;
  RbfOracle teacher;
};

/// Passage latents ~ N(0, I). Each question picks a distinct gold passage,
/// takes its latent plus N(0, noise^2 I) and carries a unique answer marker
/// that only the gold passage contains. Pure function of its arguments.
SyntheticData generate_synthetic(std::size_t n_passages, std::size_t n_questions,
                                 std::size_t latent_dim, std::uint64_t seed,
                                 const SyntheticOptions& options = {});

std::string answer_marker(std::int64_t question_id);

}  // namespace retdistill
