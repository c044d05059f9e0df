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

#include "eval/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <numeric>

#include "common/error.hpp"
#include "common/parallel.hpp"

namespace retdistill {

namespace {

std::vector<std::int64_t> rerank(const OneTowerTeacher& teacher, const Question& q,
                                 const Corpus& corpus, std::span<const std::int64_t> ids) {
  std::vector<const Passage*> cands;
  cands.reserve(ids.size());
  for (auto id : ids) cands.push_back(&corpus.at(id));
  const auto scores = teacher_scores(teacher, q, cands);
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::int64_t> out;
  out.reserve(ids.size());
  for (auto i : order) out.push_back(ids[i]);
  return out;
}

}  // namespace

PipelineResult end_to_end_accuracy(const MipsIndex& index, const TwoTowerStudent& student,
                                   const OneTowerTeacher& teacher,
                                   std::span<const Question> questions, const Corpus& corpus,
                                   std::size_t k, std::size_t workers) {
  require(k >= 1, "k must be >= 1");
  PipelineResult result;
  result.k = k;
  result.per_question.resize(questions.size());
  parallel_for(questions.size(), workers, [&](std::size_t i) {
    const auto& q = questions[i];
    require(!q.answers.empty(), "question " + std::to_string(q.id) + " has no answers");
    auto& out = result.per_question[i];
    out.question_id = q.id;
    out.retrieved = index.search(student.embed_question(q), k).ids;
    out.retrieval_hit = first_hit_rank(out.retrieved, q, corpus).has_value();
    out.reranked = rerank(teacher, q, corpus, out.retrieved);
    out.correct = !out.reranked.empty() &&
                  contains_answer(corpus.at(out.reranked.front()), q.answers);
  });
  std::size_t correct = 0, hits = 0;
  for (const auto& o : result.per_question) {
    correct += o.correct ? 1 : 0;
    hits += o.retrieval_hit ? 1 : 0;
  }
  if (!questions.empty()) {
    const auto n = static_cast<double>(questions.size());
    result.accuracy = static_cast<double>(correct) / n;
    result.retrieval_recall = static_cast<double>(hits) / n;
  }
  return result;
}

std::vector<CurvePoint> sweep_k(const MipsIndex& index, const TwoTowerStudent& student,
                                const OneTowerTeacher& teacher,
                                std::span<const Question> questions, const Corpus& corpus,
                                std::span<const std::size_t> k_values, std::size_t workers) {
  require(std::is_sorted(k_values.begin(), k_values.end()), "k_values must be ascending");
  std::vector<CurvePoint> curve;
  for (std::size_t k : k_values) {
    const auto r = end_to_end_accuracy(index, student, teacher, questions, corpus, k, workers);
    curve.push_back({k, r.accuracy, r.retrieval_recall});
  }
  return curve;
}

std::vector<std::size_t> default_sweep_grid(std::size_t corpus_size) {
  std::vector<std::size_t> out;
  for (std::size_t k : {1, 2, 5, 10, 20, 30, 40, 50, 100}) {
    if (k <= corpus_size) out.push_back(k);
  }
  return out;
}

std::vector<LatencyPoint> rerank_latency(const MipsIndex& index,
                                         const TwoTowerStudent& student,
                                         const OneTowerTeacher& teacher,
                                         std::span<const Question> questions,
                                         const Corpus& corpus,
                                         std::span<const std::size_t> k_values,
                                         std::size_t repeats) {
  require(!questions.empty(), "latency measurement needs at least one question");
  require(repeats >= 1, "repeats must be >= 1");
  std::vector<LatencyPoint> out;
  for (std::size_t k : k_values) {
    std::vector<std::vector<std::int64_t>> retrieved;
    for (const auto& q : questions) {
      retrieved.push_back(index.search(student.embed_question(q), k).ids);
    }
    // Fastest of `repeats` passes; slower passes are interference from
    // elsewhere on the machine, not re-ranking cost.
    std::size_t sink = 0;
    double best_ms = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      for (std::size_t i = 0; i < questions.size(); ++i) {
        sink += rerank(teacher, questions[i], corpus, retrieved[i]).size();
      }
      const auto t1 = std::chrono::steady_clock::now();
      best_ms = std::min(best_ms, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    require(sink > 0, "no candidates were re-ranked");
    out.push_back({k, best_ms / static_cast<double>(questions.size())});
  }
  return out;
}

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "linear fit needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, "linear fit needs distinct x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

std::string format_records(std::span<const ReportRecord> records) {
  std::string out = "metric\tk\tvalue\tn\tseed\tvariant\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%s\t%zu\t%.6f\t%zu\t%llu\t%s\n", r.metric.c_str(), r.k,
                  r.value, r.n, static_cast<unsigned long long>(r.seed), r.variant.c_str());
    out += buf;
  }
  return out;
}

}  // namespace retdistill
