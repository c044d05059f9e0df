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

#include "retdistill/retdistill.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "corpus/corpus.hpp"
#include "corpus/synthetic.hpp"
#include "distill/trainer.hpp"
#include "encoder/model_io.hpp"
#include "encoder/student.hpp"
#include "encoder/teacher.hpp"
#include "eval/experiments.hpp"
#include "eval/metrics.hpp"
#include "eval/pipeline.hpp"
#include "index/mips_index.hpp"

using namespace retdistill;

struct rd_dataset {
  Corpus corpus;
  std::vector<Question> questions;
  QuestionSplit split;
};

struct rd_student {
  TwoTowerStudent student;
};

struct rd_teacher {
  OneTowerTeacher teacher;
};

struct rd_index {
  std::unique_ptr<MipsIndex> index;
};

namespace {

thread_local std::string g_last_error;

rd_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return RD_ERR_INVALID_INPUT;
    case ErrorKind::kParse: return RD_ERR_PARSE;
    case ErrorKind::kIntegrity: return RD_ERR_INTEGRITY;
    case ErrorKind::kLookup: return RD_ERR_LOOKUP;
    case ErrorKind::kFormat: return RD_ERR_FORMAT;
    case ErrorKind::kIo: return RD_ERR_IO;
    case ErrorKind::kConfig: return RD_ERR_CONFIG;
    case ErrorKind::kNumeric: return RD_ERR_NUMERIC;
  }
  return RD_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes and the thread-local
// message.
template <typename Fn>
rd_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RD_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RD_ERR_INTERNAL;
  }
}

template <typename T>
const T& need(const T* p, const char* what) {
  if (p == nullptr) fail(ErrorKind::kInvalidInput, std::string(what) + " must not be null");
  return *p;
}

const char* need(const char* p, const char* what) {
  if (p == nullptr) fail(ErrorKind::kInvalidInput, std::string(what) + " must not be null");
  return p;
}

template <typename T>
T* need_out(T* p, const char* what) {
  if (p == nullptr) fail(ErrorKind::kInvalidInput, std::string(what) + " must not be null");
  return p;
}

char* copy_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_string(char** out, const std::string& s) {
  if (out != nullptr) *out = copy_string(s);
}

SyntheticOptions to_cpp(const rd_synthetic_options& o) {
  SyntheticOptions s;
  s.question_noise = o.question_noise;
  s.gamma = o.gamma;
  s.bins = o.bins;
  s.latent_range = o.latent_range;
  s.passage_tokens_per_dim = o.passage_tokens_per_dim;
  s.question_tokens_per_dim = o.question_tokens_per_dim;
  s.filler_vocab = o.filler_vocab;
  s.question_filler = o.question_filler;
  s.passage_length = o.passage_length;
  s.chunk_size = o.chunk_size;
  return s;
}

StudentShape to_cpp(const rd_student_shape& s) {
  return StudentShape{s.d_in, s.hidden, s.d_emb, s.feature_seed};
}

TrainConfig to_cpp(const rd_train_config& c) {
  TrainConfig t;
  t.temperature = c.temperature;
  t.kd_weight = c.kd_weight;
  t.contrastive_weight = c.contrastive_weight;
  t.learning_rate = c.learning_rate;
  t.weight_decay = c.weight_decay;
  t.beta1 = c.beta1;
  t.beta2 = c.beta2;
  t.epsilon = c.epsilon;
  t.warmup_steps = c.warmup_steps;
  t.epochs = c.epochs;
  t.batch_size = c.batch_size;
  t.passages_per_question = c.passages_per_question;
  t.validation_fraction = c.validation_fraction;
  t.selection_k = c.selection_k;
  t.refresh_candidates = c.refresh_candidates != 0;
  t.seed = c.seed;
  return t;
}

void from_cpp(const TrainConfig& t, rd_train_config* c) {
  c->temperature = t.temperature;
  c->kd_weight = t.kd_weight;
  c->contrastive_weight = t.contrastive_weight;
  c->learning_rate = t.learning_rate;
  c->weight_decay = t.weight_decay;
  c->beta1 = t.beta1;
  c->beta2 = t.beta2;
  c->epsilon = t.epsilon;
  c->warmup_steps = t.warmup_steps;
  c->epochs = t.epochs;
  c->batch_size = t.batch_size;
  c->passages_per_question = t.passages_per_question;
  c->validation_fraction = t.validation_fraction;
  c->selection_k = t.selection_k;
  c->refresh_candidates = t.refresh_candidates ? 1 : 0;
  c->seed = t.seed;
}

GraphParams to_cpp(const rd_graph_params* p) {
  GraphParams g;
  if (p != nullptr) {
    g.neighbors_per_node = p->neighbors_per_node;
    g.construction_depth = p->construction_depth;
    g.search_depth = p->search_depth;
    g.level_seed = p->level_seed;
    g.prune_slack = p->prune_slack;
  }
  return g;
}

IndexKind to_cpp(rd_index_kind kind) {
  switch (kind) {
    case RD_INDEX_FLAT: return IndexKind::kFlatIP;
    case RD_INDEX_GRAPH: return IndexKind::kGraphIP;
    case RD_INDEX_SQ8: return IndexKind::kSq8Flat;
  }
  fail(ErrorKind::kInvalidInput, "unknown index kind");
}

std::span<const Question> questions_of(const rd_dataset& ds, rd_part part) {
  switch (part) {
    case RD_PART_ALL: return ds.questions;
    case RD_PART_TRAIN: return ds.split.train;
    case RD_PART_VALID: return ds.split.valid;
    case RD_PART_TEST: return ds.split.test;
  }
  fail(ErrorKind::kInvalidInput, "unknown question part");
}

std::span<const Question> nonempty_questions(const rd_dataset& ds, rd_part part) {
  const auto qs = questions_of(ds, part);
  if (qs.empty()) fail(ErrorKind::kConfig, "selected question part is empty");
  return qs;
}

std::vector<std::size_t> k_list(const std::size_t* ks, std::size_t nk) {
  if (nk == 0) fail(ErrorKind::kInvalidInput, "at least one k is required");
  need(ks, "k_values");
  return std::vector<std::size_t>(ks, ks + nk);
}

std::size_t worker_count(std::size_t workers) {
  require(workers >= 1, "workers must be >= 1");
  return workers;
}

void apply_split(rd_dataset& ds, double train, double valid, std::uint64_t seed) {
  ds.split = split_questions(ds.questions, train, valid, seed);
}

rd_dataset* new_dataset(Corpus corpus, std::vector<Question> questions) {
  auto ds = std::make_unique<rd_dataset>();
  ds->corpus = std::move(corpus);
  ds->questions = std::move(questions);
  const SplitFractions f;
  apply_split(*ds, f.train, f.valid, 0);
  return ds.release();
}

}  // namespace

extern "C" {

const char* rd_version(void) { return "0.1.0"; }

const char* rd_status_name(rd_status status) {
  switch (status) {
    case RD_OK: return "ok";
    case RD_ERR_INVALID_INPUT: return "invalid-input";
    case RD_ERR_PARSE: return "parse";
    case RD_ERR_INTEGRITY: return "integrity";
    case RD_ERR_LOOKUP: return "lookup";
    case RD_ERR_FORMAT: return "format";
    case RD_ERR_IO: return "io";
    case RD_ERR_CONFIG: return "config";
    case RD_ERR_NUMERIC: return "numeric";
    case RD_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* rd_last_error(void) { return g_last_error.c_str(); }

void rd_string_free(char* s) { std::free(s); }

void rd_synthetic_options_default(rd_synthetic_options* out) {
  if (out == nullptr) return;
  const SyntheticOptions s;
  *out = rd_synthetic_options{s.question_noise,          s.gamma,
                              s.bins,                    s.latent_range,
                              s.passage_tokens_per_dim,  s.question_tokens_per_dim,
                              s.filler_vocab,            s.question_filler,
                              s.passage_length,          s.chunk_size};
}

void rd_student_shape_default(rd_student_shape* out) {
  if (out == nullptr) return;
  const StudentShape s;
  *out = rd_student_shape{s.d_in, s.hidden, s.d_emb, s.feature_seed};
}

void rd_train_config_default(rd_train_config* out) {
  if (out != nullptr) from_cpp(TrainConfig{}, out);
}

void rd_pretrain_config_default(rd_train_config* out) {
  if (out != nullptr) from_cpp(default_pretrain_config(), out);
}

void rd_reader_config_default(rd_train_config* out) {
  if (out != nullptr) from_cpp(default_reader_config(), out);
}

void rd_graph_params_default(rd_graph_params* out) {
  if (out == nullptr) return;
  const GraphParams g;
  *out = rd_graph_params{g.neighbors_per_node, g.construction_depth, g.search_depth,
                         g.level_seed, g.prune_slack};
}

/* ---- datasets ---- */

rd_status rd_dataset_generate(size_t n_passages, size_t n_questions, size_t latent_dim,
                              uint64_t seed, const rd_synthetic_options* options,
                              rd_dataset** out, rd_teacher** teacher_out) {
  return guarded([&] {
    need_out(out, "out");
    SyntheticOptions opt;
    if (options != nullptr) opt = to_cpp(*options);
    auto data = generate_synthetic(n_passages, n_questions, latent_dim, seed, opt);
    std::unique_ptr<rd_teacher> teacher;
    if (teacher_out != nullptr) teacher.reset(new rd_teacher{data.teacher});
    *out = new_dataset(std::move(data.corpus), std::move(data.questions));
    if (teacher_out != nullptr) *teacher_out = teacher.release();
  });
}

rd_status rd_dataset_load(const char* corpus_path, const char* questions_path,
                          rd_dataset** out) {
  return guarded([&] {
    need_out(out, "out");
    auto corpus = load_corpus(need(corpus_path, "corpus_path"));
    std::vector<Question> questions;
    if (questions_path != nullptr) questions = load_questions(questions_path);
    *out = new_dataset(std::move(corpus), std::move(questions));
  });
}

rd_status rd_dataset_save(const rd_dataset* dataset, const char* corpus_path,
                          const char* questions_path) {
  return guarded([&] {
    const auto& ds = need(dataset, "dataset");
    save_corpus(ds.corpus, need(corpus_path, "corpus_path"));
    save_questions(ds.questions, need(questions_path, "questions_path"));
  });
}

rd_status rd_dataset_set_split(rd_dataset* dataset, double train_fraction,
                               double valid_fraction, uint64_t seed) {
  return guarded([&] {
    need(dataset, "dataset");
    apply_split(*dataset, train_fraction, valid_fraction, seed);
  });
}

size_t rd_dataset_num_passages(const rd_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->corpus.size();
}

size_t rd_dataset_num_questions(const rd_dataset* dataset, rd_part part) {
  if (dataset == nullptr) return 0;
  switch (part) {
    case RD_PART_ALL: return dataset->questions.size();
    case RD_PART_TRAIN: return dataset->split.train.size();
    case RD_PART_VALID: return dataset->split.valid.size();
    case RD_PART_TEST: return dataset->split.test.size();
  }
  return 0;
}

void rd_dataset_free(rd_dataset* dataset) { delete dataset; }

/* ---- students ---- */

rd_status rd_student_create(const rd_student_shape* shape, uint64_t seed, rd_student** out) {
  return guarded([&] {
    need_out(out, "out");
    StudentShape s;
    if (shape != nullptr) s = to_cpp(*shape);
    *out = new rd_student{TwoTowerStudent::create(s, seed)};
  });
}

rd_status rd_student_load(const char* path, rd_student** out, size_t* step,
                          double* validation_recall) {
  return guarded([&] {
    need_out(out, "out");
    auto ckpt = load_checkpoint(need(path, "path"));
    if (step != nullptr) *step = ckpt.step;
    if (validation_recall != nullptr) *validation_recall = ckpt.validation_recall;
    *out = new rd_student{std::move(ckpt.student)};
  });
}

rd_status rd_student_save(const rd_student* student, const char* path, size_t step,
                          double validation_recall) {
  return guarded([&] {
    const auto& s = need(student, "student");
    save_checkpoint(Checkpoint{s.student, step, validation_recall}, need(path, "path"));
  });
}

size_t rd_student_dim(const rd_student* student) {
  return student == nullptr ? 0 : student->student.d_emb();
}

rd_status rd_student_embed(const rd_student* student, const char* text, int as_question,
                           double* out, size_t capacity) {
  return guarded([&] {
    const auto& s = need(student, "student").student;
    need_out(out, "out");
    const auto tokens = tokenize(need(text, "text"));
    Embedding e;
    if (as_question != 0) {
      Question q;
      q.text = tokens;
      e = s.embed_question(q);
    } else {
      Passage p;
      p.tokens = tokens;
      e = s.embed_passage(p);
    }
    require(capacity >= e.size(), "output buffer is smaller than the embedding dimension");
    std::copy(e.begin(), e.end(), out);
  });
}

void rd_student_free(rd_student* student) { delete student; }

/* ---- teachers ---- */

rd_status rd_teacher_load(const char* path, rd_teacher** out) {
  return guarded([&] {
    need_out(out, "out");
    *out = new rd_teacher{load_teacher(need(path, "path"))};
  });
}

rd_status rd_teacher_save(const rd_teacher* teacher, const char* path) {
  return guarded([&] { save_teacher(need(teacher, "teacher").teacher, need(path, "path")); });
}

int rd_teacher_is_joint(const rd_teacher* teacher) {
  return teacher != nullptr && std::holds_alternative<JointMlp>(teacher->teacher) ? 1 : 0;
}

void rd_teacher_free(rd_teacher* teacher) { delete teacher; }

/* ---- training ---- */

rd_status rd_pretrain(const rd_student* initial, const rd_dataset* dataset,
                      const rd_train_config* config, rd_student** out, char** log) {
  return guarded([&] {
    const auto& init = need(initial, "initial").student;
    const auto& ds = need(dataset, "dataset");
    need_out(out, "out");
    const TrainConfig cfg = config != nullptr ? to_cpp(*config) : default_pretrain_config();
    TrainLog train_log;
    auto result = std::make_unique<rd_student>(rd_student{
        pretrain_student(init, ds.corpus, nonempty_questions(ds, RD_PART_TRAIN), cfg,
                         &train_log)});
    set_string(log, train_log.to_text());
    *out = result.release();
  });
}

rd_status rd_distill(const rd_student* initial, const rd_teacher* teacher,
                     const rd_dataset* dataset, const rd_index* candidate_index,
                     const rd_train_config* config, size_t workers, rd_student** best,
                     size_t* best_step, double* best_recall, char** log) {
  return guarded([&] {
    const auto& init = need(initial, "initial").student;
    const auto& t = need(teacher, "teacher").teacher;
    const auto& ds = need(dataset, "dataset");
    need_out(best, "best");
    const TrainConfig cfg = config != nullptr ? to_cpp(*config) : TrainConfig{};
    const auto w = worker_count(workers);
    std::unique_ptr<MipsIndex> own;
    const MipsIndex* candidates = nullptr;
    if (candidate_index != nullptr) {
      candidates = &need(candidate_index->index.get(), "candidate index");
    } else {
      own = build_flat(init.embed_corpus(ds.corpus, w));
      candidates = own.get();
    }
    auto result = train(init, t, ds.corpus, nonempty_questions(ds, RD_PART_TRAIN),
                        nonempty_questions(ds, RD_PART_VALID), *candidates, cfg, w);
    auto out = std::make_unique<rd_student>(rd_student{std::move(result.best.student)});
    if (best_step != nullptr) *best_step = result.best.step;
    if (best_recall != nullptr) *best_recall = result.best.validation_recall;
    set_string(log, result.log.to_text());
    *best = out.release();
  });
}

/* ---- indexes ---- */

rd_status rd_index_build(const rd_student* student, const rd_dataset* dataset,
                         rd_index_kind kind, const rd_graph_params* params, size_t workers,
                         rd_index** out) {
  return guarded([&] {
    const auto& s = need(student, "student").student;
    const auto& ds = need(dataset, "dataset");
    need_out(out, "out");
    const auto embeddings = s.embed_corpus(ds.corpus, worker_count(workers));
    *out = new rd_index{build_index(to_cpp(kind), embeddings, to_cpp(params))};
  });
}

rd_status rd_index_build_vectors(const double* vectors, size_t n, size_t dim,
                                 rd_index_kind kind, const rd_graph_params* params,
                                 rd_index** out) {
  return guarded([&] {
    need(vectors, "vectors");
    need_out(out, "out");
    require(n >= 1 && dim >= 1, "need at least one vector of positive dimension");
    EmbeddingMatrix m(n, dim, std::vector<double>(vectors, vectors + n * dim));
    *out = new rd_index{build_index(to_cpp(kind), m, to_cpp(params))};
  });
}

rd_status rd_index_load(const char* path, rd_index** out) {
  return guarded([&] {
    need_out(out, "out");
    *out = new rd_index{deserialize_index(need(path, "path"))};
  });
}

rd_status rd_index_save(const rd_index* index, const char* path) {
  return guarded([&] { serialize_index(*need(index, "index").index, need(path, "path")); });
}

rd_index_kind rd_index_get_kind(const rd_index* index) {
  if (index == nullptr) return RD_INDEX_FLAT;
  switch (index->index->kind()) {
    case IndexKind::kFlatIP: return RD_INDEX_FLAT;
    case IndexKind::kGraphIP: return RD_INDEX_GRAPH;
    case IndexKind::kSq8Flat: return RD_INDEX_SQ8;
  }
  return RD_INDEX_FLAT;
}

size_t rd_index_size(const rd_index* index) {
  return index == nullptr ? 0 : index->index->size();
}

size_t rd_index_dim(const rd_index* index) { return index == nullptr ? 0 : index->index->dim(); }

rd_status rd_index_search(const rd_index* index, const double* query, size_t dim, size_t k,
                          int64_t* ids, double* scores, size_t* n_out) {
  return guarded([&] {
    const auto& idx = *need(index, "index").index;
    need(query, "query");
    need_out(n_out, "n_out");
    if (k > 0) {
      need_out(ids, "ids");
      need_out(scores, "scores");
    }
    const auto hits = idx.search(std::span<const double>(query, dim), k);
    std::copy(hits.ids.begin(), hits.ids.end(), ids);
    std::copy(hits.scores.begin(), hits.scores.end(), scores);
    *n_out = hits.ids.size();
  });
}

void rd_index_free(rd_index* index) { delete index; }

/* ---- evaluation and experiments ---- */

rd_status rd_eval_recall(const rd_index* index, const rd_student* student,
                         const rd_dataset* dataset, rd_part part, const size_t* k_values,
                         size_t nk, size_t workers, double* recall_out, size_t* n_questions) {
  return guarded([&] {
    const auto& idx = *need(index, "index").index;
    const auto& s = need(student, "student").student;
    const auto& ds = need(dataset, "dataset");
    need_out(recall_out, "recall_out");
    const auto ks = k_list(k_values, nk);
    const auto report = recall_at_k(idx, s, nonempty_questions(ds, part), ds.corpus, ks,
                                    worker_count(workers));
    std::copy(report.recall.begin(), report.recall.end(), recall_out);
    if (n_questions != nullptr) *n_questions = report.n_questions;
  });
}

rd_status rd_sweep_k(const rd_index* index, const rd_student* student,
                     const rd_teacher* teacher, const rd_dataset* dataset, rd_part part,
                     const size_t* k_values, size_t nk, size_t workers, double* accuracy_out,
                     double* recall_out) {
  return guarded([&] {
    const auto& idx = *need(index, "index").index;
    const auto& s = need(student, "student").student;
    const auto& t = need(teacher, "teacher").teacher;
    const auto& ds = need(dataset, "dataset");
    need_out(accuracy_out, "accuracy_out");
    const auto ks = k_list(k_values, nk);
    const auto curve =
        sweep_k(idx, s, t, nonempty_questions(ds, part), ds.corpus, ks, worker_count(workers));
    for (std::size_t i = 0; i < curve.size(); ++i) {
      accuracy_out[i] = curve[i].accuracy;
      if (recall_out != nullptr) recall_out[i] = curve[i].retrieval_recall;
    }
  });
}

rd_status rd_negative_study(const rd_index* index, const rd_student* student,
                            const rd_dataset* dataset, rd_part eval_part,
                            const rd_negative_source* sources, const size_t* counts,
                            size_t n_variants, const size_t* k_values, size_t nk,
                            size_t reader_hidden, const rd_train_config* reader_config,
                            uint64_t seed, size_t workers, const char* reader_dir,
                            char** report) {
  return guarded([&] {
    const auto& idx = *need(index, "index").index;
    const auto& s = need(student, "student").student;
    const auto& ds = need(dataset, "dataset");
    NegativeStudyOptions opt;
    if (n_variants > 0) {
      need(sources, "sources");
      need(counts, "counts");
      opt.variants.clear();
      for (std::size_t i = 0; i < n_variants; ++i) {
        require(sources[i] == RD_NEGATIVES_RANDOM || sources[i] == RD_NEGATIVES_RETRIEVED,
                "unknown negative source");
        opt.variants.push_back({sources[i] == RD_NEGATIVES_RANDOM ? NegativeSource::kRandom
                                                                  : NegativeSource::kRetrieved,
                                counts[i]});
      }
    }
    if (nk > 0) opt.k_values = k_list(k_values, nk);
    opt.reader_hidden = reader_hidden;
    if (reader_config != nullptr) opt.reader = to_cpp(*reader_config);
    opt.seed = seed;
    opt.workers = worker_count(workers);
    const auto curves =
        negative_sampling_study(ds.corpus, nonempty_questions(ds, RD_PART_TRAIN),
                                nonempty_questions(ds, eval_part), idx, s, opt);
    if (reader_dir != nullptr) {
      const std::filesystem::path dir(reader_dir);
      for (const auto& c : curves) {
        save_teacher(OneTowerTeacher{c.reader},
                     dir / ("reader-" + negative_variant_name(c.variant) + ".rdrm"));
      }
    }
    set_string(report, format_records(negative_study_records(curves, seed)));
  });
}

rd_status rd_ablate(size_t n_passages, size_t n_questions, size_t latent_dim, uint64_t seed,
                    const rd_synthetic_options* options, const rd_student_shape* shape,
                    const rd_train_config* pretrain, const rd_train_config* finetune,
                    double train_fraction, double valid_fraction, const size_t* k_values,
                    size_t nk, size_t workers, char** report, rd_student** distilled,
                    rd_student** contrastive) {
  return guarded([&] {
    SyntheticOptions syn;
    if (options != nullptr) syn = to_cpp(*options);
    const auto data = generate_synthetic(n_passages, n_questions, latent_dim, seed, syn);
    AblationOptions opt;
    if (shape != nullptr) opt.shape = to_cpp(*shape);
    opt.seed = seed;
    opt.split = SplitFractions{train_fraction, valid_fraction};
    opt.pretrain = pretrain != nullptr ? to_cpp(*pretrain) : default_pretrain_config();
    if (finetune != nullptr) opt.finetune = to_cpp(*finetune);
    if (nk > 0) opt.k_values = k_list(k_values, nk);
    opt.workers = worker_count(workers);
    auto result = ablate_distillation(data, opt);
    std::unique_ptr<rd_student> kd, cl;
    if (distilled != nullptr) kd.reset(new rd_student{result.distilled_checkpoint.student});
    if (contrastive != nullptr) {
      cl.reset(new rd_student{result.contrastive_checkpoint.student});
    }
    set_string(report, format_records(ablation_records(result, seed)));
    if (distilled != nullptr) *distilled = kd.release();
    if (contrastive != nullptr) *contrastive = cl.release();
  });
}

rd_status rd_bench_index(const rd_index* index, const rd_index* flat_ref,
                         const rd_student* student, const rd_dataset* dataset, rd_part part,
                         const size_t* k_values, size_t nk, char** table) {
  return guarded([&] {
    const auto& idx = *need(index, "index").index;
    const auto& s = need(student, "student").student;
    const auto& ds = need(dataset, "dataset");
    need_out(table, "table");
    const auto ks = k_list(k_values, nk);
    const auto queries = s.embed_questions(nonempty_questions(ds, part));
    const MipsIndex* ref = flat_ref != nullptr ? flat_ref->index.get() : nullptr;
    const auto rows = bench_search(idx, queries, ks, ref);
    *table = copy_string(format_bench_table(rows));
  });
}

rd_status rd_rerank_latency(const rd_index* index, const rd_student* student,
                            const rd_teacher* teacher, const rd_dataset* dataset, rd_part part,
                            const size_t* k_values, size_t nk, size_t repeats,
                            double* ms_out, double* r_squared) {
  return guarded([&] {
    const auto& idx = *need(index, "index").index;
    const auto& s = need(student, "student").student;
    const auto& t = need(teacher, "teacher").teacher;
    const auto& ds = need(dataset, "dataset");
    need_out(ms_out, "ms_out");
    const auto ks = k_list(k_values, nk);
    const auto points =
        rerank_latency(idx, s, t, nonempty_questions(ds, part), ds.corpus, ks, repeats);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < points.size(); ++i) {
      ms_out[i] = points[i].mean_ms;
      x.push_back(static_cast<double>(points[i].k));
      y.push_back(points[i].mean_ms);
    }
    if (r_squared != nullptr) *r_squared = points.size() >= 2 ? fit_linear(x, y).r_squared : 1.0;
  });
}

rd_status rd_finetune_reader(const rd_teacher* reader, const rd_index* index,
                             const rd_student* student, const rd_dataset* dataset,
                             rd_part eval_part, size_t k, size_t negatives,
                             const rd_train_config* config, uint64_t seed, size_t workers,
                             rd_teacher** out, double* accuracy_before, double* accuracy_after) {
  return guarded([&] {
    const auto& t = need(reader, "reader").teacher;
    const auto* joint = std::get_if<JointMlp>(&t);
    if (joint == nullptr) fail(ErrorKind::kConfig, "finetune-reader needs a joint reader model");
    const auto& idx = *need(index, "index").index;
    const auto& s = need(student, "student").student;
    const auto& ds = need(dataset, "dataset");
    need_out(out, "out");
    FinetuneReaderOptions opt;
    opt.k = k;
    opt.negatives = negatives;
    opt.seed = seed;
    if (config != nullptr) opt.reader = to_cpp(*config);
    opt.workers = worker_count(workers);
    auto result = finetune_reader_after_swap(*joint, ds.corpus,
                                             nonempty_questions(ds, RD_PART_TRAIN),
                                             nonempty_questions(ds, eval_part), idx, s, opt);
    if (accuracy_before != nullptr) *accuracy_before = result.accuracy_before;
    if (accuracy_after != nullptr) *accuracy_after = result.accuracy_after;
    *out = new rd_teacher{OneTowerTeacher{std::move(result.finetuned)}};
  });
}

}  // extern "C"
