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

#include <gtest/gtest.h>

#include <set>
#include <string>
#include <vector>

#include "corpus/corpus.hpp"
#include "corpus/synthetic.hpp"
#include "test_util.hpp"

namespace retdistill {
namespace {

using testing::error_kind_of;
using testing::TempDir;
using testing::write_file;

std::string words(std::size_t n, const std::string& stem = "w") {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += stem + std::to_string(i);
  }
  return out;
}

Passage passage_of(std::vector<std::string> tokens) {
  Passage p;
  p.tokens = std::move(tokens);
  return p;
}

TEST(Chunking, TwoHundredFiftyWordsGiveThreeWindows) {
  const auto ps = chunk_document("t", words(250), 100);
  ASSERT_EQ(ps.size(), 3u);
  EXPECT_EQ(ps[0].tokens.size(), 100u);
  EXPECT_EQ(ps[1].tokens.size(), 100u);
  EXPECT_EQ(ps[2].tokens.size(), 50u);
}

TEST(Chunking, ExactFitGivesOneWindow) {
  const auto ps = chunk_document("t", words(100), 100);
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].tokens.size(), 100u);
}

TEST(Chunking, SingleWordBody) {
  const auto ps = chunk_document("t", "solo", 100);
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].tokens, std::vector<std::string>{"solo"});
}

TEST(Chunking, EmptyBodyIsInvalidInput) {
  EXPECT_EQ(error_kind_of([] { chunk_document("t", "  \n\t ", 100); }),
            static_cast<int>(ErrorKind::kInvalidInput));
}

TEST(Chunking, IsAPartitionOfTheBody) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 400;
    const std::size_t chunk = 1 + rng() % 120;
    const auto body = words(n);
    const auto ps = chunk_document("title", body, chunk, 7);
    std::vector<std::string> joined;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      EXPECT_EQ(ps[i].id, static_cast<std::int64_t>(7 + i));
      EXPECT_EQ(ps[i].title, "title");
      EXPECT_GE(ps[i].tokens.size(), 1u);
      EXPECT_LE(ps[i].tokens.size(), chunk);
      if (i + 1 < ps.size()) {
        EXPECT_EQ(ps[i].tokens.size(), chunk);
      }
      joined.insert(joined.end(), ps[i].tokens.begin(), ps[i].tokens.end());
    }
    EXPECT_EQ(joined, tokenize(body));
  }
}

TEST(ContainsAnswer, CaseNormalizedPhrase) {
  const auto p = passage_of({"the", "Eiffel", "Tower", "opened"});
  const std::vector<std::string> answers{"eiffel tower"};
  EXPECT_TRUE(contains_answer(p, answers));
}

TEST(ContainsAnswer, AbsentAnswer) {
  const auto p = passage_of({"paris", "france"});
  const std::vector<std::string> answers{"London"};
  EXPECT_FALSE(contains_answer(p, answers));
}

TEST(ContainsAnswer, AnyOfSeveralAnswers) {
  const auto p = passage_of({"a", "b", "c"});
  const std::vector<std::string> answers{"b c", "z"};
  EXPECT_TRUE(contains_answer(p, answers));
}

TEST(ContainsAnswer, PunctuationAtTokenBoundariesIsIgnored) {
  const auto p = passage_of({"in", "\"Paris,", "France.\""});
  EXPECT_TRUE(contains_answer(p, std::vector<std::string>{"paris france"}));
  EXPECT_FALSE(contains_answer(p, std::vector<std::string>{"france paris"}));
}

TEST(ContainsAnswer, NonContiguousTokensDoNotMatch) {
  const auto p = passage_of({"a", "x", "b"});
  EXPECT_FALSE(contains_answer(p, std::vector<std::string>{"a b"}));
}

// Independent oracle: scan every start position of the normalized passage.
bool subsequence_oracle(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty()) return false;
  for (std::size_t s = 0; s + needle.size() <= hay.size(); ++s) {
    bool all = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (hay[s + j] != needle[j]) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

TEST(ContainsAnswer, AgreesWithBruteForceScanAndIgnoresCase) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> vocab{"a", "b", "c", "d"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> hay(1 + rng() % 8), needle(1 + rng() % 3);
    for (auto& t : hay) t = vocab[rng() % vocab.size()];
    for (auto& t : needle) t = vocab[rng() % vocab.size()];
    const auto p = passage_of(hay);
    const std::string answer = join_tokens(needle);
    const bool expected = subsequence_oracle(hay, needle);
    EXPECT_EQ(contains_answer(p, std::vector<std::string>{answer}), expected);

    std::string upper = answer;
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    auto shouted = hay;
    for (auto& t : shouted) {
      for (auto& c : t) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    EXPECT_EQ(contains_answer(passage_of(shouted), std::vector<std::string>{upper}), expected);
  }
}

TEST(CorpusFiles, RoundTrip) {
  TempDir dir;
  const auto data = generate_synthetic(40, 10, 3, 2);
  save_corpus(data.corpus, dir / "c.jsonl");
  save_questions(data.questions, dir / "q.jsonl");
  const auto corpus = load_corpus(dir / "c.jsonl");
  const auto questions = load_questions(dir / "q.jsonl");
  ASSERT_EQ(corpus.size(), data.corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(corpus.passages[i].id, data.corpus.passages[i].id);
    EXPECT_EQ(corpus.passages[i].title, data.corpus.passages[i].title);
    EXPECT_EQ(corpus.passages[i].tokens, data.corpus.passages[i].tokens);
  }
  ASSERT_EQ(questions.size(), data.questions.size());
  for (std::size_t i = 0; i < questions.size(); ++i) {
    EXPECT_EQ(questions[i].id, data.questions[i].id);
    EXPECT_EQ(questions[i].text, data.questions[i].text);
    EXPECT_EQ(questions[i].answers, data.questions[i].answers);
    EXPECT_EQ(questions[i].gold_passage_ids, data.questions[i].gold_passage_ids);
  }
}

TEST(CorpusFiles, RecordsAreSortedById) {
  TempDir dir;
  write_file(dir / "c.jsonl",
             "{\"id\": 1, \"title\": \"b\", \"text\": \"second\"}\n"
             "\n"
             "{\"id\": 0, \"title\": \"a\", \"text\": \"first passage\"}\n");
  const auto corpus = load_corpus(dir / "c.jsonl");
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus.at(0).tokens, (std::vector<std::string>{"first", "passage"}));
  EXPECT_EQ(corpus.at(1).title, "b");
}

TEST(CorpusFiles, MalformedLineIsParseErrorWithLineNumber) {
  TempDir dir;
  write_file(dir / "c.jsonl",
             "{\"id\": 0, \"title\": \"a\", \"text\": \"ok\"}\n"
             "{\"id\": 1, \"title\": \"b\", \"text\": }\n");
  try {
    load_corpus(dir / "c.jsonl");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(CorpusFiles, MissingFieldIsParseError) {
  TempDir dir;
  write_file(dir / "c.jsonl", "{\"id\": 0, \"title\": \"a\"}\n");
  EXPECT_EQ(error_kind_of([&] { load_corpus(dir / "c.jsonl"); }),
            static_cast<int>(ErrorKind::kParse));
}

TEST(CorpusFiles, DuplicateIdIsIntegrityError) {
  TempDir dir;
  write_file(dir / "c.jsonl",
             "{\"id\": 0, \"title\": \"a\", \"text\": \"x\"}\n"
             "{\"id\": 0, \"title\": \"b\", \"text\": \"y\"}\n");
  EXPECT_EQ(error_kind_of([&] { load_corpus(dir / "c.jsonl"); }),
            static_cast<int>(ErrorKind::kIntegrity));
}

TEST(CorpusFiles, SparseIdsAndOverlongPassagesAreIntegrityErrors) {
  TempDir dir;
  write_file(dir / "gap.jsonl",
             "{\"id\": 0, \"title\": \"a\", \"text\": \"x\"}\n"
             "{\"id\": 2, \"title\": \"b\", \"text\": \"y\"}\n");
  EXPECT_EQ(error_kind_of([&] { load_corpus(dir / "gap.jsonl"); }),
            static_cast<int>(ErrorKind::kIntegrity));
  write_file(dir / "long.jsonl", "{\"id\": 0, \"title\": \"a\", \"text\": \"" + words(5) + "\"}\n");
  EXPECT_EQ(error_kind_of([&] { load_corpus(dir / "long.jsonl", 4); }),
            static_cast<int>(ErrorKind::kIntegrity));
  write_file(dir / "empty.jsonl", "\n");
  EXPECT_EQ(error_kind_of([&] { load_corpus(dir / "empty.jsonl"); }),
            static_cast<int>(ErrorKind::kIntegrity));
}

TEST(CorpusFiles, MissingFileIsIoError) {
  TempDir dir;
  EXPECT_EQ(error_kind_of([&] { load_corpus(dir / "nope.jsonl"); }),
            static_cast<int>(ErrorKind::kIo));
}

TEST(QuestionFiles, MissingAnswersAreFlagged) {
  TempDir dir;
  write_file(dir / "q.jsonl",
             "{\"id\": 3, \"question\": \"who is it\"}\n"
             "{\"id\": 4, \"question\": \"what\", \"answers\": [\"x\", \"y z\"]}\n");
  const auto qs = load_questions(dir / "q.jsonl");
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_TRUE(qs[0].answers_missing);
  EXPECT_TRUE(qs[0].answers.empty());
  EXPECT_FALSE(qs[1].answers_missing);
  EXPECT_EQ(qs[1].answers, (std::vector<std::string>{"x", "y z"}));
  EXPECT_TRUE(qs[1].gold_passage_ids.empty());
}

TEST(QuestionFiles, MalformedLineIsParseErrorWithLineNumber) {
  TempDir dir;
  write_file(dir / "q.jsonl",
             "{\"id\": 0, \"question\": \"a\", \"answers\": []}\n"
             "{\"id\": 1, \"question\": \"b\", \"answers\": \"not a list\"}\n");
  try {
    load_questions(dir / "q.jsonl");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
}

TEST(Split, IsDeterministicDisjointAndComplete) {
  const auto data = generate_synthetic(200, 100, 4, 1);
  const auto a = split_questions(data.questions, 0.6, 0.1, 42);
  const auto b = split_questions(data.questions, 0.6, 0.1, 42);
  EXPECT_EQ(a.train.size(), 60u);
  EXPECT_EQ(a.valid.size(), 10u);
  EXPECT_EQ(a.test.size(), 30u);
  std::set<std::int64_t> ids;
  for (const auto* part : {&a.train, &a.valid, &a.test}) {
    for (const auto& q : *part) EXPECT_TRUE(ids.insert(q.id).second);
  }
  EXPECT_EQ(ids.size(), 100u);
  ASSERT_EQ(a.test.size(), b.test.size());
  for (std::size_t i = 0; i < a.test.size(); ++i) EXPECT_EQ(a.test[i].id, b.test[i].id);
  const auto c = split_questions(data.questions, 0.6, 0.1, 43);
  bool differs = false;
  for (std::size_t i = 0; i < a.test.size(); ++i) differs |= a.test[i].id != c.test[i].id;
  EXPECT_TRUE(differs);
  EXPECT_EQ(error_kind_of([&] { split_questions(data.questions, 0.8, 0.3, 1); }),
            static_cast<int>(ErrorKind::kInvalidInput));
}

TEST(Synthetic, SameSeedGivesIdenticalOutput) {
  const auto a = generate_synthetic(100, 10, 8, 1);
  const auto b = generate_synthetic(100, 10, 8, 1);
  ASSERT_EQ(a.corpus.size(), b.corpus.size());
  for (std::size_t i = 0; i < a.corpus.size(); ++i) {
    EXPECT_EQ(a.corpus.passages[i].tokens, b.corpus.passages[i].tokens);
    EXPECT_EQ(a.corpus.passages[i].title, b.corpus.passages[i].title);
  }
  ASSERT_EQ(a.questions.size(), b.questions.size());
  for (std::size_t i = 0; i < a.questions.size(); ++i) {
    EXPECT_EQ(a.questions[i].text, b.questions[i].text);
    EXPECT_EQ(a.questions[i].answers, b.questions[i].answers);
    EXPECT_EQ(a.questions[i].gold_passage_ids, b.questions[i].gold_passage_ids);
  }
  EXPECT_TRUE(a.teacher == b.teacher);
  const auto c = generate_synthetic(100, 10, 8, 2);
  EXPECT_FALSE(a.teacher == c.teacher);
}

TEST(Synthetic, GoldPassagesContainTheAnswerAndOnlyThey) {
  const auto data = generate_synthetic(300, 60, 8, 4);
  std::set<std::int64_t> golds;
  for (const auto& q : data.questions) {
    ASSERT_EQ(q.gold_passage_ids.size(), 1u);
    ASSERT_FALSE(q.answers.empty());
    const auto gold = q.gold_passage_ids.front();
    EXPECT_TRUE(golds.insert(gold).second) << "gold passages are distinct";
    EXPECT_TRUE(contains_answer(data.corpus.at(gold), q.answers));
    for (const auto& p : data.corpus.passages) {
      if (p.id != gold) {
        EXPECT_FALSE(contains_answer(p, q.answers));
      }
    }
  }
  for (const auto& p : data.corpus.passages) {
    EXPECT_GE(p.tokens.size(), 1u);
    EXPECT_LE(p.tokens.size(), data.corpus.chunk_size);
  }
}

TEST(Synthetic, TeacherTopOneIsGoldForAtLeast95Percent) {
  const auto data = generate_synthetic(1000, 100, 8, 1);
  std::size_t hits = 0;
  for (const auto& q : data.questions) {
    std::int64_t best = -1;
    double best_score = -1.0;
    for (const auto& p : data.corpus.passages) {
      const double s = data.teacher.score(q, p);
      if (s > best_score) {
        best_score = s;
        best = p.id;
      }
    }
    if (best == q.gold_passage_ids.front()) ++hits;
  }
  EXPECT_GE(static_cast<double>(hits) / data.questions.size(), 0.95);
}

TEST(Synthetic, RejectsInvalidSizes) {
  EXPECT_EQ(error_kind_of([] { generate_synthetic(5, 6, 8, 1); }),
            static_cast<int>(ErrorKind::kInvalidInput));
  EXPECT_EQ(error_kind_of([] { generate_synthetic(5, 0, 8, 1); }),
            static_cast<int>(ErrorKind::kInvalidInput));
  EXPECT_EQ(error_kind_of([] { generate_synthetic(5, 2, 1, 1); }),
            static_cast<int>(ErrorKind::kInvalidInput));
}

}  // namespace
}  // namespace retdistill
