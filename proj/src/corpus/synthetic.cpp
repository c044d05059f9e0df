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

#include "corpus/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "common/error.hpp"

namespace retdistill {

std::string answer_marker(std::int64_t question_id) {
  return "ans" + std::to_string(question_id);
}

namespace {

void encode_latent(std::span<const double> latent, std::size_t per_dim,
                   const SyntheticOptions& opt, std::vector<std::string>& out) {
  const double top = static_cast<double>(opt.bins - 1);
  for (std::size_t j = 0; j < latent.size(); ++j) {
    double pos = (latent[j] + opt.latent_range) / (2.0 * opt.latent_range) * top;
    pos = std::clamp(pos, 0.0, top);
    const auto lo = std::min(static_cast<std::size_t>(pos), opt.bins - 2);
    const double frac = pos - static_cast<double>(lo);
    const auto n_hi = static_cast<std::size_t>(
        std::lround(frac * static_cast<double>(per_dim)));
    const std::string prefix = "z" + std::to_string(j) + "b";
    for (std::size_t r = 0; r < per_dim; ++r) {
      out.push_back(prefix + std::to_string(r < n_hi ? lo + 1 : lo));
    }
  }
}

}  // namespace

SyntheticData generate_synthetic(std::size_t n_passages, std::size_t n_questions,
                                 std::size_t latent_dim, std::uint64_t seed,
                                 const SyntheticOptions& opt) {
  require(n_questions >= 1, "n_questions must be >= 1");
  require(n_passages >= n_questions, "n_questions must not exceed n_passages");
  require(latent_dim >= 2, "latent_dim must be >= 2");
  require(opt.bins >= 2 && opt.latent_range > 0.0 && opt.filler_vocab >= 1,
          "invalid synthetic options");
  require(opt.passage_length <= opt.chunk_size, "passage_length exceeds chunk_size");
  require(latent_dim * opt.passage_tokens_per_dim + 1 <= opt.chunk_size,
          "latent encoding does not fit in a passage");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> filler(0, opt.filler_vocab - 1);
  auto filler_token = [&] { return "w" + std::to_string(filler(rng)); };

  std::vector<double> passage_latents(n_passages * latent_dim);
  for (auto& v : passage_latents) v = normal(rng);

  std::vector<std::size_t> order(n_passages);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < n_questions; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n_passages - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<std::int64_t> gold_of_passage(n_passages, -1);
  std::vector<double> question_latents(n_questions * latent_dim);
  for (std::size_t q = 0; q < n_questions; ++q) {
    const std::size_t g = order[q];
    gold_of_passage[g] = static_cast<std::int64_t>(q);
    for (std::size_t j = 0; j < latent_dim; ++j) {
      question_latents[q * latent_dim + j] =
          passage_latents[g * latent_dim + j] + opt.question_noise * normal(rng);
    }
  }

  SyntheticData data{Corpus{}, {},
                     RbfOracle(opt.gamma, latent_dim, passage_latents,
                               question_latents)};
  data.corpus.chunk_size = opt.chunk_size;
  data.corpus.passages.reserve(n_passages);
  for (std::size_t i = 0; i < n_passages; ++i) {
    Passage p;
    p.id = static_cast<std::int64_t>(i);
    p.title = "Passage " + std::to_string(i);
    encode_latent({passage_latents.data() + i * latent_dim, latent_dim},
                  opt.passage_tokens_per_dim, opt, p.tokens);
    if (gold_of_passage[i] >= 0) p.tokens.push_back(answer_marker(gold_of_passage[i]));
    while (p.tokens.size() < opt.passage_length) p.tokens.push_back(filler_token());
    std::shuffle(p.tokens.begin(), p.tokens.end(), rng);
    data.corpus.passages.push_back(std::move(p));
  }

  data.questions.reserve(n_questions);
  for (std::size_t q = 0; q < n_questions; ++q) {
    Question question;
    question.id = static_cast<std::int64_t>(q);
    encode_latent({question_latents.data() + q * latent_dim, latent_dim},
                  opt.question_tokens_per_dim, opt, question.text);
    for (std::size_t f = 0; f < opt.question_filler; ++f) {
      question.text.push_back(filler_token());
    }
    std::shuffle(question.text.begin(), question.text.end(), rng);
    question.text.insert(question.text.begin(), "which");
    question.answers = {answer_marker(question.id)};
    question.gold_passage_ids = {static_cast<std::int64_t>(order[q])};
    data.questions.push_back(std::move(question));
  }
  data.corpus.validate_and_sort();
  return data;
}

}  // namespace retdistill
