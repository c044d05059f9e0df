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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "common/linalg.hpp"
#include "corpus/synthetic.hpp"
#include "distill/losses.hpp"
#include "distill/objective.hpp"
#include "distill/trainer.hpp"
#include "encoder/reader.hpp"
#include "encoder/student.hpp"
#include "encoder/teacher.hpp"
#include "eval/experiments.hpp"
#include "eval/metrics.hpp"
#include "eval/pipeline.hpp"
#include "index/mips_index.hpp"

#ifndef RETDISTILL_CLI_PATH
#error "RETDISTILL_CLI_PATH must point at the command-line binary"
#endif

using namespace retdistill;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

EmbeddingMatrix gaussian_matrix(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  EmbeddingMatrix m(rows, dim);
  for (std::size_t i = 0; i < rows; ++i) {
    for (auto& v : m.row(i)) v = nd(rng);
  }
  return m;
}

// Brute force: score every row left to right, sort by score desc then id asc.
std::vector<std::pair<double, std::int64_t>> brute_force(const EmbeddingMatrix& data,
                                                         std::span<const double> q) {
  std::vector<std::pair<double, std::int64_t>> all;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double s = 0.0;
    const auto r = data.row(i);
    for (std::size_t j = 0; j < q.size(); ++j) s += q[j] * r[j];
    all.emplace_back(s, static_cast<std::int64_t>(i));
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  return all;
}

Outcome criterion_1() {
  const auto data = gaussian_matrix(1000, 64, 11);
  const auto queries = gaussian_matrix(100, 64, 12);
  const auto index = build_flat(data);
  std::size_t mismatches = 0;
  for (std::size_t qi = 0; qi < queries.rows(); ++qi) {
    const auto oracle = brute_force(data, queries.row(qi));
    for (std::size_t k : {1, 10, 100}) {
      const auto got = index->search(queries.row(qi), k);
      if (got.ids.size() != k) ++mismatches;
      for (std::size_t r = 0; r < std::min(k, got.ids.size()); ++r) {
        if (got.ids[r] != oracle[r].second || got.scores[r] != oracle[r].first) ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt("%zu mismatches over 100 queries x k in {1,10,100}", mismatches)};
}

Outcome criterion_2() {
  const auto data = gaussian_matrix(500, 32, 21);
  const auto queries = gaussian_matrix(50, 32, 22);
  double max_norm = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    max_norm = std::max(max_norm, std::sqrt(squared_norm(data.row(i))));
  }
  std::vector<std::vector<double>> aug;
  for (std::size_t i = 0; i < data.rows(); ++i) aug.push_back(max_norm_augment(data.row(i), max_norm));
  std::size_t bad_rankings = 0;
  for (std::size_t qi = 0; qi < queries.rows(); ++qi) {
    const auto q = queries.row(qi);
    std::vector<double> qa(q.begin(), q.end());
    qa.push_back(0.0);
    std::vector<std::pair<double, std::int64_t>> l2;
    for (std::size_t i = 0; i < aug.size(); ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < qa.size(); ++j) d += (qa[j] - aug[i][j]) * (qa[j] - aug[i][j]);
      l2.emplace_back(d, static_cast<std::int64_t>(i));
    }
    std::sort(l2.begin(), l2.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : a.second < b.second;
    });
    const auto ip = brute_force(data, q);
    for (std::size_t r = 0; r < ip.size(); ++r) {
      if (ip[r].second != l2[r].second) {
        ++bad_rankings;
        break;
      }
    }
  }
  return {bad_rankings == 0,
          fmt("%zu of 50 full 500-item rankings differ between augmented L2 and inner product",
              bad_rankings)};
}

double overlap_recall(const MipsIndex& approx, const MipsIndex& exact,
                      const EmbeddingMatrix& queries, std::size_t k) {
  double total = 0.0;
  for (std::size_t qi = 0; qi < queries.rows(); ++qi) {
    auto a = approx.search(queries.row(qi), k).ids;
    auto e = exact.search(queries.row(qi), k).ids;
    std::sort(a.begin(), a.end());
    std::sort(e.begin(), e.end());
    std::vector<std::int64_t> common;
    std::set_intersection(a.begin(), a.end(), e.begin(), e.end(), std::back_inserter(common));
    total += static_cast<double>(common.size()) / static_cast<double>(e.size());
  }
  return total / static_cast<double>(queries.rows());
}

double mean_search_ms(const MipsIndex& index, const EmbeddingMatrix& queries, std::size_t k) {
  const auto t0 = Clock::now();
  std::size_t sink = 0;
  for (std::size_t qi = 0; qi < queries.rows(); ++qi) {
    sink += index.search(queries.row(qi), k).ids.size();
  }
  const double ms = seconds_since(t0) * 1000.0;
  return sink == 0 ? 0.0 : ms / static_cast<double>(queries.rows());
}

Outcome criterion_3() {
  const GraphParams defaults;
  const auto data = gaussian_matrix(10000, 64, 31);
  const auto queries = gaussian_matrix(200, 64, 32);
  const auto graph = build_graph(data, defaults);
  const auto flat = build_flat(data);
  const double recall = overlap_recall(*graph, *flat, queries, 10);

  const auto big = gaussian_matrix(100000, 64, 33);
  const auto t0 = Clock::now();
  const auto big_graph = build_graph(big, defaults);
  const double build_s = seconds_since(t0);
  const auto big_flat = build_flat(big);
  const double graph_ms = mean_search_ms(*big_graph, queries, 10);
  const double flat_ms = mean_search_ms(*big_flat, queries, 10);
  return {recall >= 0.95 && graph_ms < flat_ms,
          fmt("recall@10 vs flat %.4f at 10k (>= 0.95); at 100k graph %.3f ms vs flat %.3f ms "
              "per query (100k build %.1f s)",
              recall, graph_ms, flat_ms, build_s)};
}

// Synthetic acceptance corpus shared by criteria 4 and 7.
struct AcceptanceSetup {
  SyntheticData data;
  QuestionSplit split;
  TwoTowerStudent student;
};

AcceptanceSetup make_acceptance_setup() {
  auto data = generate_synthetic(2000, 200, 8, 3);
  auto split = split_questions(data.questions, 0.6, 0.1, 3);
  const auto init = TwoTowerStudent::create({}, 3);
  auto pre_cfg = default_pretrain_config();
  pre_cfg.seed = 3;
  const auto pre = pretrain_student(init, data.corpus, split.train, pre_cfg);
  const auto candidates = build_flat(pre.embed_corpus(data.corpus));
  TrainConfig cfg;
  cfg.seed = 3;
  auto result = train(pre, OneTowerTeacher{data.teacher}, data.corpus, split.train, split.valid,
                      *candidates, cfg);
  return {std::move(data), std::move(split), std::move(result.best.student)};
}

Outcome criterion_4(const AcceptanceSetup& setup) {
  const auto vectors = gaussian_matrix(1000, 32, 41);
  const auto sq = ScalarQuantizer::train(vectors);
  double worst_excess = -1.0;
  for (std::size_t i = 0; i < vectors.rows(); ++i) {
    const auto row = vectors.row(i);
    const auto back = sq.decode(sq.encode(row));
    for (std::size_t d = 0; d < row.size(); ++d) {
      const double bound = (sq.maxs()[d] - sq.mins()[d]) / 510.0 + 1e-12;
      worst_excess = std::max(worst_excess, std::abs(back[d] - row[d]) - bound);
    }
  }
  const auto embeddings = setup.student.embed_corpus(setup.data.corpus);
  const auto queries = setup.student.embed_questions(setup.data.questions);
  const auto sq8 = build_sq8(embeddings);
  const auto flat = build_flat(embeddings);
  const double recall = overlap_recall(*sq8, *flat, queries, 100);
  return {worst_excess <= 0.0 && recall >= 0.98,
          fmt("max roundtrip error minus bound %.3g (<= 0); recall@100 vs flat %.4f (>= 0.98)",
              worst_excess, recall)};
}

// Relative error between analytic and central-difference gradients.
double gradient_rel_error(std::span<const double> analytic, std::span<const double> numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  const double scale = std::max({std::sqrt(na), std::sqrt(nn), 1e-300});
  return std::sqrt(diff) / scale;
}

// Central differences over every parameter of both towers.
std::vector<double> student_fd(TwoTowerStudent& s, const std::function<double()>& loss) {
  constexpr double h = 1e-5;
  std::vector<double> out;
  for (auto* tower : {&s.question_map(), &s.passage_map()}) {
    auto p = tower->params();
    for (auto& v : p) {
      const double saved = v;
      v = saved + h;
      const double up = loss();
      v = saved - h;
      const double down = loss();
      v = saved;
      out.push_back((up - down) / (2.0 * h));
    }
  }
  return out;
}

std::vector<double> flatten(const StudentGradient& g) {
  std::vector<double> out(g.question_map);
  out.insert(out.end(), g.passage_map.begin(), g.passage_map.end());
  return out;
}

void randomize(std::span<double> params, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& v : params) v = u(rng);
}

Outcome criterion_5() {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ut(0.1, 10.0);
  double worst_norm = 0.0;
  bool shift_exact = true, kl_ok = true, argmax_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 30;
    std::vector<double> z(n), shifted(n), z2(n);
    // Scores on a 2^-10 grid with integer shifts: the shifted inputs are
    // exactly representable, so any difference would come from the softmax.
    const double c = std::round(nd(rng) * 50.0);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = std::round(nd(rng) * 4096.0) / 1024.0;
      shifted[i] = z[i] + c;
      z2[i] = nd(rng) * 3.0;
    }
    const double t = ut(rng);
    const auto p = softmax_with_temperature(z, t);
    const auto ps = softmax_with_temperature(shifted, t);
    worst_norm = std::max(worst_norm, std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));
    if (p != ps) shift_exact = false;
    const auto q = softmax_with_temperature(z2, t);
    const double kl_pq = kl_divergence(p, q);
    if (!(kl_pq >= 0.0) || kl_divergence(p, p) != 0.0) kl_ok = false;
    if (p != q && !(kl_pq > 0.0)) kl_ok = false;
    const auto am = std::max_element(z.begin(), z.end()) - z.begin();
    if (std::max_element(p.begin(), p.end()) - p.begin() != am) argmax_ok = false;
  }

  // Gradient checks at 100 random parameter points each.
  const auto data = generate_synthetic(60, 12, 4, 52);
  const auto& corpus = data.corpus;
  const OneTowerTeacher teacher = data.teacher;
  double worst_kd = 0.0, worst_cl = 0.0, worst_inbatch = 0.0, worst_reader = 0.0;
  std::uniform_int_distribution<std::size_t> pick_p(0, corpus.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_q(0, data.questions.size() - 1);
  for (int point = 0; point < 100; ++point) {
    StudentShape shape;
    shape.d_in = 24;
    shape.hidden = point % 2 == 0 ? 0 : 6;
    shape.d_emb = 4;
    auto s = TwoTowerStudent::create(shape, 1000 + point);
    randomize(s.question_map().params(), rng, 0.8);
    randomize(s.passage_map().params(), rng, 0.8);
    const auto& q = data.questions[pick_q(rng)];
    std::vector<const Passage*> cands;
    for (int i = 0; i < 8; ++i) cands.push_back(&corpus.at(pick_p(rng)));
    const auto tscores = teacher_scores(teacher, q, cands);
    const double temp = 0.5 + (point % 5);

    auto kd = [&] {
      return candidate_objective(s, q, cands, tscores, std::nullopt, temp, 1.0, 0.0).kd;
    };
    StudentGradient g_kd(s);
    candidate_objective(s, q, cands, tscores, std::nullopt, temp, 1.0, 0.0, &g_kd);
    worst_kd = std::max(worst_kd, gradient_rel_error(flatten(g_kd), student_fd(s, kd)));

    std::vector<const Passage*> negs(cands.begin() + 1, cands.end());
    auto cl = [&] { return contrastive_loss(s, q, *cands[0], negs); };
    StudentGradient g_cl(s);
    contrastive_loss(s, q, *cands[0], negs, &g_cl);
    worst_cl = std::max(worst_cl, gradient_rel_error(flatten(g_cl), student_fd(s, cl)));

    std::vector<const Question*> bq;
    std::vector<const Passage*> bp;
    for (int i = 0; i < 4; ++i) {
      bq.push_back(&data.questions[(point + i) % data.questions.size()]);
      bp.push_back(&corpus.at(pick_p(rng)));
    }
    auto ib = [&] { return in_batch_contrastive(s, bq, bp); };
    StudentGradient g_ib(s);
    in_batch_contrastive(s, bq, bp, &g_ib);
    worst_inbatch = std::max(worst_inbatch, gradient_rel_error(flatten(g_ib), student_fd(s, ib)));

    auto reader = JointMlp::create(24, 6, 2000 + point);
    randomize(reader.net().params(), rng, 0.8);
    ReaderItem item{&q, cands[0], negs};
    std::vector<double> g_r(reader.net().num_params(), 0.0);
    reader_cross_entropy(reader, item, g_r);
    std::vector<double> fd_r;
    constexpr double h = 1e-5;
    for (auto& v : reader.net().params()) {
      const double saved = v;
      v = saved + h;
      const double up = reader_cross_entropy(reader, item);
      v = saved - h;
      const double down = reader_cross_entropy(reader, item);
      v = saved;
      fd_r.push_back((up - down) / (2.0 * h));
    }
    worst_reader = std::max(worst_reader, gradient_rel_error(g_r, fd_r));
  }
  const double worst_grad = std::max({worst_kd, worst_cl, worst_inbatch, worst_reader});
  return {worst_norm <= 1e-9 && shift_exact && kl_ok && argmax_ok && worst_grad < 1e-4,
          fmt("softmax |sum-1| max %.2g; shift invariance %s; KL>=0 and KL(p,p)=0 %s; "
              "gradient rel. error max: kd %.2g, contrastive %.2g, in-batch %.2g, reader %.2g",
              worst_norm, shift_exact ? "exact" : "VIOLATED", kl_ok ? "ok" : "VIOLATED",
              worst_kd, worst_cl, worst_inbatch, worst_reader)};
}

Outcome criterion_6() {
  const auto data = generate_synthetic(2000, 200, 8, 3);
  AblationOptions opt;
  opt.seed = 3;
  opt.pretrain = default_pretrain_config();
  const auto report = ablate_distillation(data, opt);
  const double gap1 = report.delta[0];
  const double gap20 = report.delta[1];
  return {report.shared_start && gap1 >= 0.02 && gap1 > gap20,
          fmt("recall@1 KD %.4f vs contrastive %.4f (gap %+.4f, need >= 0.02); gap@20 %+.4f "
              "(need < gap@1); shared start %s",
              report.distilled.recall[0], report.contrastive.recall[0], gap1, gap20,
              report.shared_start ? "yes" : "no")};
}

Outcome criterion_7(const AcceptanceSetup& setup) {
  const auto& corpus = setup.data.corpus;
  const auto index = build_flat(setup.student.embed_corpus(corpus));
  const OneTowerTeacher teacher = setup.data.teacher;
  const std::vector<std::size_t> ks{1, 2, 5, 10, 20, 50, 100, 200};
  const auto& qs = setup.data.questions;
  const auto recall = recall_at_k(*index, setup.student, qs, corpus, ks);
  const auto curve = sweep_k(*index, setup.student, teacher, qs, corpus, ks);
  bool at1 = curve[0].accuracy == recall.recall[0];
  bool bounded = true, monotone = true;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (curve[i].accuracy > recall.recall[i]) bounded = false;
    if (i > 0 && recall.recall[i] < recall.recall[i - 1]) monotone = false;
  }
  return {at1 && bounded && monotone,
          fmt("accuracy@1 %.4f vs recall@1 %.4f (%s); accuracy <= recall@k %s; recall "
              "non-decreasing %s",
              curve[0].accuracy, recall.recall[0], at1 ? "equal" : "DIFFER",
              bounded ? "holds" : "VIOLATED", monotone ? "holds" : "VIOLATED")};
}

Outcome criterion_8() {
  const std::vector<std::size_t> ks{1, 2, 5, 10, 20, 50, 100};
  // Repeat-run identity on the acceptance corpus.
  const auto data = generate_synthetic(2000, 200, 8, 3);
  const auto student = TwoTowerStudent::create({}, 8);
  const auto index = build_flat(student.embed_corpus(data.corpus));
  const OneTowerTeacher teacher = data.teacher;
  const auto a = sweep_k(*index, student, teacher, data.questions, data.corpus, ks);
  const auto b = sweep_k(*index, student, teacher, data.questions, data.corpus, ks);
  bool complete = a.size() == ks.size();
  bool repeat = a.size() == b.size();
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    complete = complete && a[i].k == ks[i];
    repeat = repeat && a[i].k == b[i].k && a[i].accuracy == b[i].accuracy &&
             a[i].retrieval_recall == b[i].retrieval_recall;
  }

  // Two-stage oracle on a 20-passage instance: rank all passages by student
  // score (ties by id), keep top-k, pick the teacher's best (ties keep
  // retrieval order), check the answer.
  const auto small = generate_synthetic(20, 8, 4, 81);
  const auto s2 = TwoTowerStudent::create({}, 82);
  const auto small_index = build_flat(s2.embed_corpus(small.corpus));
  const OneTowerTeacher t2 = small.teacher;
  const auto got = sweep_k(*small_index, s2, t2, small.questions, small.corpus, ks);
  std::size_t mismatches = 0;
  for (std::size_t ki = 0; ki < ks.size(); ++ki) {
    std::size_t correct = 0;
    for (const auto& q : small.questions) {
      std::vector<std::pair<double, std::int64_t>> ranked;
      const auto qe = s2.embed_question(q);
      for (const auto& p : small.corpus.passages) {
        const auto pe = s2.embed_passage(p);
        double sc = 0.0;
        for (std::size_t j = 0; j < qe.size(); ++j) sc += qe[j] * pe[j];
        ranked.emplace_back(sc, p.id);
      }
      std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        return x.first != y.first ? x.first > y.first : x.second < y.second;
      });
      const std::size_t top = std::min(ks[ki], ranked.size());
      std::int64_t best = ranked[0].second;
      double best_score = small.teacher.score(q.id, best);
      for (std::size_t r = 1; r < top; ++r) {
        const double sc = small.teacher.score(q.id, ranked[r].second);
        if (sc > best_score) {
          best_score = sc;
          best = ranked[r].second;
        }
      }
      if (contains_answer(small.corpus.at(best), q.answers)) ++correct;
    }
    const double oracle = static_cast<double>(correct) / static_cast<double>(small.questions.size());
    if (got[ki].accuracy != oracle) ++mismatches;
  }
  return {complete && repeat && mismatches == 0,
          fmt("curve complete %s; repeat run identical %s; %zu of %zu points differ from the "
              "brute-force two-stage oracle on 20 passages",
              complete ? "yes" : "NO", repeat ? "yes" : "NO", mismatches, ks.size())};
}

Outcome criterion_9() {
  const auto data = generate_synthetic(2000, 200, 8, 3);
  const auto student = TwoTowerStudent::create({}, 9);
  const auto index = build_flat(student.embed_corpus(data.corpus));
  const OneTowerTeacher reader = JointMlp::create(student.features().dim(), 64, 9);
  const std::vector<std::size_t> ks{1, 10, 20, 30, 40, 50};
  const auto points = rerank_latency(*index, student, reader, data.questions, data.corpus, ks, 5);
  std::vector<double> x, y;
  std::string series;
  for (const auto& p : points) {
    x.push_back(static_cast<double>(p.k));
    y.push_back(p.mean_ms);
    series += fmt(" %zu:%.3f", p.k, p.mean_ms);
  }
  const auto fit = fit_linear(x, y);
  return {fit.r_squared >= 0.95,
          fmt("R^2 %.4f (>= 0.95), slope %.4f ms per passage; k:ms%s", fit.r_squared, fit.slope,
              series.c_str())};
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Outcome criterion_10() {
  const fs::path root = fs::temp_directory_path() / fs::path("retdistill-acceptance-" +
                                                             std::to_string(::getpid()));
  fs::remove_all(root);
  const std::string cli = RETDISTILL_CLI_PATH;
  const std::vector<std::string> steps{
      "gen-corpus --passages 2000 --questions 200 --latent-dim 8",
      "pretrain",
      "distill",
      "build-index --kind flat",
      "build-index --kind graph",
      "build-index --kind sq8",
      "build-index --kind flat --student run/pretrained.rdrm --output index-pretrained.rdrx",
      "eval-recall",
      "eval-recall --student run/pretrained.rdrm --index run/index-pretrained.rdrx "
      "--output recall-pretrained.tsv",
      "eval-recall --index run/index-graph.rdrx --output recall-graph.tsv",
      "eval-recall --index run/index-sq8.rdrx --output recall-sq8.tsv",
      "sweep-k",
      "search --query \"z0b5 z1b6 z2b4 z3b7\" --k 5",
      "neg-study --index run/index-pretrained.rdrx --student run/pretrained.rdrm",
      "finetune-reader --reader run/reader-retrieved-23.rdrm",
      "ablate --passages 500 --questions 50",
  };
  std::string failure;
  for (const char* name : {"a", "b"}) {
    const auto dir = root / name;
    fs::create_directories(dir);
    for (const auto& step : steps) {
      const auto cmd = "cd \"" + dir.string() + "\" && \"" + cli + "\" " + step +
                       " --seed 3 --workers 1 --out-dir run > /dev/null";
      if (std::system(cmd.c_str()) != 0 && failure.empty()) failure = "command failed: " + step;
    }
  }
  std::size_t compared = 0, differing = 0;
  std::string first_diff;
  if (failure.empty()) {
    for (const auto& entry : fs::directory_iterator(root / "a" / "run")) {
      const auto other = root / "b" / "run" / entry.path().filename();
      ++compared;
      if (!fs::exists(other) || read_bytes(entry.path()) != read_bytes(other)) {
        ++differing;
        if (first_diff.empty()) first_diff = entry.path().filename().string();
      }
    }
  }
  const bool kd_better = [&] {
    auto r1 = [&](const char* file) {
      std::istringstream in(read_bytes(root / "a" / "run" / file));
      std::string line;
      std::getline(in, line);
      std::getline(in, line);
      std::istringstream fields(line);
      std::string metric, k, value;
      fields >> metric >> k >> value;
      return value.empty() ? -1.0 : std::stod(value);
    };
    return r1("recall.tsv") > r1("recall-pretrained.tsv");
  }();
  fs::remove_all(root);
  if (!failure.empty()) return {false, failure};
  return {differing == 0 && compared > 0,
          fmt("%zu artifacts compared, %zu differ%s%s; KD recall@1 above pretrained %s", compared,
              differing, first_diff.empty() ? "" : " (first: ", first_diff.empty() ? "" : ")",
              kd_better ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  std::printf("preparing acceptance corpus student...\n");
  std::fflush(stdout);
  const auto setup_t0 = Clock::now();
  const AcceptanceSetup setup = make_acceptance_setup();
  const double setup_s = seconds_since(setup_t0);
  const std::vector<Criterion> criteria{
      {1, "flat index exactness", 5.0, criterion_1},
      {2, "max-norm ranking equivalence", 5.0, criterion_2},
      {3, "graph index quality", 120.0, criterion_3},
      // The shared setup (pretrain + distill) counts toward criteria using it.
      {4, "sq8 fidelity", 30.0 - setup_s, [&] { return criterion_4(setup); }},
      {5, "distillation math", 60.0, criterion_5},
      {6, "distillation ablation direction", 300.0, criterion_6},
      {7, "pipeline identities", 60.0 - setup_s, [&] { return criterion_7(setup); }},
      {8, "k-sweep harness", 60.0, criterion_8},
      {9, "re-ranking latency linearity", 60.0, criterion_9},
      {10, "CLI determinism", 600.0, criterion_10},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = seconds_since(t0);
    const bool in_time = elapsed < c.budget_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %d [%s]: %s (%.2f s of %.0f s budget%s) %s\n", c.id, c.name,
                pass ? "PASS" : "FAIL", elapsed, c.budget_s, in_time ? "" : ", OVER BUDGET",
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
