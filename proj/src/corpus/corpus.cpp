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

#include "corpus/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "common/error.hpp"

namespace retdistill {

using nlohmann::json;

const Passage& Corpus::at(std::int64_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= passages.size()) {
    fail(ErrorKind::kLookup, "unknown passage id " + std::to_string(id));
  }
  return passages[static_cast<std::size_t>(id)];
}

void Corpus::validate_and_sort() {
  if (passages.empty()) fail(ErrorKind::kIntegrity, "corpus is empty");
  if (chunk_size == 0) fail(ErrorKind::kIntegrity, "chunk_size must be positive");
  std::vector<char> seen(passages.size(), 0);
  for (const auto& p : passages) {
    if (p.id < 0 || static_cast<std::size_t>(p.id) >= passages.size()) {
      fail(ErrorKind::kIntegrity,
           "passage id " + std::to_string(p.id) + " outside [0, N)");
    }
    if (seen[static_cast<std::size_t>(p.id)]) {
      fail(ErrorKind::kIntegrity, "duplicate passage id " + std::to_string(p.id));
    }
    seen[static_cast<std::size_t>(p.id)] = 1;
    if (p.tokens.empty() || p.tokens.size() > chunk_size) {
      fail(ErrorKind::kIntegrity, "passage " + std::to_string(p.id) +
                                      " has " + std::to_string(p.tokens.size()) +
                                      " tokens, chunk_size is " +
                                      std::to_string(chunk_size));
    }
  }
  std::sort(passages.begin(), passages.end(),
            [](const Passage& a, const Passage& b) { return a.id < b.id; });
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<Passage> chunk_document(std::string_view title,
                                    std::string_view body,
                                    std::size_t chunk_size,
                                    std::int64_t first_id) {
  require(chunk_size > 0, "chunk_size must be positive");
  auto words = tokenize(body);
  require(!words.empty(), "document body is empty after tokenization");
  std::vector<Passage> out;
  for (std::size_t start = 0; start < words.size(); start += chunk_size) {
    const std::size_t end = std::min(words.size(), start + chunk_size);
    Passage p;
    p.id = first_id + static_cast<std::int64_t>(out.size());
    p.title = std::string(title);
    p.tokens.assign(std::make_move_iterator(words.begin() + start),
                    std::make_move_iterator(words.begin() + end));
    out.push_back(std::move(p));
  }
  return out;
}

std::string normalize_token(std::string_view token) {
  std::size_t b = 0, e = token.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(token[e - 1]))) --e;
  std::string out(token.substr(b, e - b));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

namespace {

std::vector<std::string> normalized_tokens(std::span<const std::string> raw) {
  std::vector<std::string> out;
  out.reserve(raw.size());
  for (const auto& t : raw) {
    auto n = normalize_token(t);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

}  // namespace

bool contains_answer(const Passage& passage,
                     std::span<const std::string> answers) {
  const auto hay = normalized_tokens(passage.tokens);
  for (const auto& answer : answers) {
    const auto needle = normalized_tokens(tokenize(answer));
    if (needle.empty() || needle.size() > hay.size()) continue;
    if (std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) !=
        hay.end()) {
      return true;
    }
  }
  return false;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

[[noreturn]] void parse_error(const std::filesystem::path& path,
                              std::size_t line_no, const std::string& why) {
  fail(ErrorKind::kParse,
       path.string() + ":" + std::to_string(line_no) + ": " + why);
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path, std::size_t chunk_size) {
  auto in = open_input(path);
  Corpus corpus;
  corpus.chunk_size = chunk_size;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      parse_error(path, line_no, e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_number_integer() ||
        !rec.contains("text") || !rec["text"].is_string()) {
      parse_error(path, line_no, "expected fields id (integer), title, text");
    }
    Passage p;
    p.id = rec["id"].get<std::int64_t>();
    if (rec.contains("title")) {
      if (!rec["title"].is_string()) parse_error(path, line_no, "title must be a string");
      p.title = rec["title"].get<std::string>();
    }
    p.tokens = tokenize(rec["text"].get<std::string>());
    corpus.passages.push_back(std::move(p));
  }
  corpus.validate_and_sort();
  return corpus;
}

std::vector<Question> load_questions(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<Question> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      parse_error(path, line_no, e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_number_integer() ||
        !rec.contains("question") || !rec["question"].is_string()) {
      parse_error(path, line_no, "expected fields id (integer), question, answers");
    }
    Question q;
    q.id = rec["id"].get<std::int64_t>();
    q.text = tokenize(rec["question"].get<std::string>());
    if (rec.contains("answers")) {
      const auto& a = rec["answers"];
      if (!a.is_array()) parse_error(path, line_no, "answers must be an array");
      for (const auto& s : a) {
        if (!s.is_string()) parse_error(path, line_no, "answers must be strings");
        q.answers.push_back(s.get<std::string>());
      }
    } else {
      q.answers_missing = true;
    }
    if (rec.contains("gold_passage_ids")) {
      const auto& g = rec["gold_passage_ids"];
      if (!g.is_array()) parse_error(path, line_no, "gold_passage_ids must be an array");
      for (const auto& id : g) {
        if (!id.is_number_integer()) parse_error(path, line_no, "gold ids must be integers");
        q.gold_passage_ids.push_back(id.get<std::int64_t>());
      }
    }
    out.push_back(std::move(q));
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& p : corpus.passages) {
    json rec = {{"id", p.id}, {"title", p.title}, {"text", join_tokens(p.tokens)}};
    out << rec.dump() << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

void save_questions(std::span<const Question> questions,
                    const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& q : questions) {
    json rec = {{"id", q.id}, {"question", join_tokens(q.text)}};
    if (!q.answers_missing) rec["answers"] = q.answers;
    if (!q.gold_passage_ids.empty()) rec["gold_passage_ids"] = q.gold_passage_ids;
    out << rec.dump() << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

QuestionSplit split_questions(std::span<const Question> questions,
                              double train_fraction, double valid_fraction,
                              std::uint64_t seed) {
  require(train_fraction >= 0 && valid_fraction >= 0 &&
              train_fraction + valid_fraction <= 1.0,
          "split fractions must be non-negative and sum to at most 1");
  std::vector<std::size_t> order(questions.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n = questions.size();
  const auto n_train = static_cast<std::size_t>(train_fraction * n + 0.5);
  const auto n_valid =
      std::min(n - n_train, static_cast<std::size_t>(valid_fraction * n + 0.5));
  QuestionSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& q = questions[order[i]];
    if (i < n_train) {
      split.train.push_back(q);
    } else if (i < n_train + n_valid) {
      split.valid.push_back(q);
    } else {
      split.test.push_back(q);
    }
  }
  auto by_id = [](const Question& a, const Question& b) { return a.id < b.id; };
  std::sort(split.train.begin(), split.train.end(), by_id);
  std::sort(split.valid.begin(), split.valid.end(), by_id);
  std::sort(split.test.begin(), split.test.end(), by_id);
  return split;
}

}  // namespace retdistill
