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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace retdistill {

inline constexpr std::size_t kDefaultChunkSize = 100;

struct Passage {
  std::int64_t id = 0;
  std::string title;
  std::vector<std::string> tokens;
};

struct Question {
  std::int64_t id = 0;
  std::vector<std::string> text;
  std::vector<std::string> answers;
  std::vector<std::int64_t> gold_passage_ids;
  // Set when the source record had no answers field.
  bool answers_missing = false;
};

/// Passages ordered by id; ids are dense in [0, size()).
struct Corpus {
  std::vector<Passage> passages;
  std::size_t chunk_size = kDefaultChunkSize;

  std::size_t size() const { return passages.size(); }
  const Passage& at(std::int64_t id) const;

  /// Throws an integrity error unless ids are unique and dense and every
  /// passage has between 1 and chunk_size tokens. Reorders passages by id.
  void validate_and_sort();
};

std::vector<std::string> tokenize(std::string_view text);
std::string join_tokens(std::span<const std::string> tokens);

/// Splits body into consecutive non-overlapping windows of chunk_size words.
std::vector<Passage> chunk_document(std::string_view title,
                                    std::string_view body,
                                    std::size_t chunk_size = kDefaultChunkSize,
                                    std::int64_t first_id = 0);

/// Lowercases and strips punctuation at the token boundaries. May return an
/// empty string for tokens made only of punctuation.
std::string normalize_token(std::string_view token);

bool contains_answer(const Passage& passage,
                     std::span<const std::string> answers);

// JSON-lines files. Corpus records: {"id", "title", "text"}. Question
// records: {"id", "question", "answers", optional "gold_passage_ids"}.
Corpus load_corpus(const std::filesystem::path& path,
                   std::size_t chunk_size = kDefaultChunkSize);
std::vector<Question> load_questions(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
void save_questions(std::span<const Question> questions,
                    const std::filesystem::path& path);

struct QuestionSplit {
  std::vector<Question> train;
  std::vector<Question> valid;
  std::vector<Question> test;
};

/// Deterministic shuffled split; test receives the remainder.
QuestionSplit split_questions(std::span<const Question> questions,
                              double train_fraction, double valid_fraction,
                              std::uint64_t seed);

}  // namespace retdistill
