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

/* C interface to the retdistill library.
 *
 * Every fallible call returns an rd_status; on failure rd_last_error() gives a
 * one-line message for the calling thread. Objects are opaque handles created
 * by rd_*_create / rd_*_load / rd_*_build style calls and released with the
 * matching rd_*_free. Strings returned through char** are owned by the caller
 * and released with rd_string_free.
 *
 * Report strings hold one record per line with tab separated fields
 *   metric  k  value  n  seed  variant
 */
#ifndef RETDISTILL_RETDISTILL_H_
#define RETDISTILL_RETDISTILL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RD_API __declspec(dllexport)
#else
#define RD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rd_status {
  RD_OK = 0,
  RD_ERR_INVALID_INPUT = 1,
  RD_ERR_PARSE = 2,
  RD_ERR_INTEGRITY = 3,
  RD_ERR_LOOKUP = 4,
  RD_ERR_FORMAT = 5,
  RD_ERR_IO = 6,
  RD_ERR_CONFIG = 7,
  RD_ERR_NUMERIC = 8,
  RD_ERR_INTERNAL = 99
} rd_status;

typedef enum rd_index_kind {
  RD_INDEX_FLAT = 0,
  RD_INDEX_GRAPH = 1,
  RD_INDEX_SQ8 = 2
} rd_index_kind;

/* Question subsets of a dataset; see rd_dataset_set_split. */
typedef enum rd_part {
  RD_PART_ALL = 0,
  RD_PART_TRAIN = 1,
  RD_PART_VALID = 2,
  RD_PART_TEST = 3
} rd_part;

typedef enum rd_negative_source {
  RD_NEGATIVES_RANDOM = 0,
  RD_NEGATIVES_RETRIEVED = 1
} rd_negative_source;

typedef struct rd_dataset rd_dataset;
typedef struct rd_student rd_student;
typedef struct rd_teacher rd_teacher;
typedef struct rd_index rd_index;

typedef struct rd_synthetic_options {
  double question_noise;
  double gamma;
  size_t bins;
  double latent_range;
  size_t passage_tokens_per_dim;
  size_t question_tokens_per_dim;
  size_t filler_vocab;
  size_t question_filler;
  size_t passage_length;
  size_t chunk_size;
} rd_synthetic_options;

typedef struct rd_student_shape {
  size_t d_in;
  size_t hidden; /* 0: one affine layer per tower */
  size_t d_emb;
  uint64_t feature_seed;
} rd_student_shape;

typedef struct rd_train_config {
  double temperature;
  double kd_weight;
  double contrastive_weight;
  double learning_rate;
  double weight_decay;
  double beta1;
  double beta2;
  double epsilon;
  size_t warmup_steps;
  size_t epochs;
  size_t batch_size;
  size_t passages_per_question;
  double validation_fraction;
  size_t selection_k;
  int refresh_candidates;
  uint64_t seed;
} rd_train_config;

typedef struct rd_graph_params {
  size_t neighbors_per_node;
  size_t construction_depth;
  size_t search_depth;
  uint64_t level_seed;
  double prune_slack;
} rd_graph_params;

/* ---- misc ---- */
RD_API const char* rd_version(void);
RD_API const char* rd_status_name(rd_status status);
RD_API const char* rd_last_error(void);
RD_API void rd_string_free(char* s);

RD_API void rd_synthetic_options_default(rd_synthetic_options* out);
RD_API void rd_student_shape_default(rd_student_shape* out);
/* Distillation finetuning defaults (pure KD, T = 3). */
RD_API void rd_train_config_default(rd_train_config* out);
/* Contrastive pretraining defaults. */
RD_API void rd_pretrain_config_default(rd_train_config* out);
/* Joint reader training defaults. */
RD_API void rd_reader_config_default(rd_train_config* out);
RD_API void rd_graph_params_default(rd_graph_params* out);

/* ---- datasets ---- */
/* Planted-latent corpus; teacher_out (optional) receives the RBF oracle. */
RD_API rd_status rd_dataset_generate(size_t n_passages, size_t n_questions, size_t latent_dim,
                                     uint64_t seed, const rd_synthetic_options* options,
                                     rd_dataset** out, rd_teacher** teacher_out);
/* questions_path may be NULL for a corpus-only dataset. */
RD_API rd_status rd_dataset_load(const char* corpus_path, const char* questions_path,
                                 rd_dataset** out);
RD_API rd_status rd_dataset_save(const rd_dataset* dataset, const char* corpus_path,
                                 const char* questions_path);
/* Shuffled train/valid/test split; test takes the remainder. A new dataset
 * starts with (0.6, 0.1, seed 0). */
RD_API rd_status rd_dataset_set_split(rd_dataset* dataset, double train_fraction,
                                      double valid_fraction, uint64_t seed);
RD_API size_t rd_dataset_num_passages(const rd_dataset* dataset);
RD_API size_t rd_dataset_num_questions(const rd_dataset* dataset, rd_part part);
RD_API void rd_dataset_free(rd_dataset* dataset);

/* ---- students ---- */
RD_API rd_status rd_student_create(const rd_student_shape* shape, uint64_t seed,
                                   rd_student** out);
/* step and validation_recall may be NULL. */
RD_API rd_status rd_student_load(const char* path, rd_student** out, size_t* step,
                                 double* validation_recall);
RD_API rd_status rd_student_save(const rd_student* student, const char* path, size_t step,
                                 double validation_recall);
RD_API size_t rd_student_dim(const rd_student* student);
/* Embeds whitespace-tokenized text with the question (as_question != 0) or
 * passage tower into out[0 .. rd_student_dim). */
RD_API rd_status rd_student_embed(const rd_student* student, const char* text, int as_question,
                                  double* out, size_t capacity);
RD_API void rd_student_free(rd_student* student);

/* ---- teachers ---- */
RD_API rd_status rd_teacher_load(const char* path, rd_teacher** out);
RD_API rd_status rd_teacher_save(const rd_teacher* teacher, const char* path);
/* 1 for a trainable joint reader, 0 for the RBF oracle. */
RD_API int rd_teacher_is_joint(const rd_teacher* teacher);
RD_API void rd_teacher_free(rd_teacher* teacher);

/* ---- training ---- */
/* Contrastive pretraining on the train part. log (optional) receives the
 * per-step training records. */
RD_API rd_status rd_pretrain(const rd_student* initial, const rd_dataset* dataset,
                             const rd_train_config* config, rd_student** out, char** log);
/* Distillation on the train part with checkpoint selection on the valid
 * part. Candidates come from candidate_index queried with the initial
 * student; when it is NULL a flat index over the initial student is used. */
RD_API rd_status rd_distill(const rd_student* initial, const rd_teacher* teacher,
                            const rd_dataset* dataset, const rd_index* candidate_index,
                            const rd_train_config* config, size_t workers, rd_student** best,
                            size_t* best_step, double* best_recall, char** log);

/* ---- indexes ---- */
RD_API rd_status rd_index_build(const rd_student* student, const rd_dataset* dataset,
                                rd_index_kind kind, const rd_graph_params* params,
                                size_t workers, rd_index** out);
/* Builds from n row-major vectors of dimension dim. */
RD_API rd_status rd_index_build_vectors(const double* vectors, size_t n, size_t dim,
                                        rd_index_kind kind, const rd_graph_params* params,
                                        rd_index** out);
RD_API rd_status rd_index_load(const char* path, rd_index** out);
RD_API rd_status rd_index_save(const rd_index* index, const char* path);
RD_API rd_index_kind rd_index_get_kind(const rd_index* index);
RD_API size_t rd_index_size(const rd_index* index);
RD_API size_t rd_index_dim(const rd_index* index);
/* Writes up to k results; *n_out receives the count. */
RD_API rd_status rd_index_search(const rd_index* index, const double* query, size_t dim,
                                 size_t k, int64_t* ids, double* scores, size_t* n_out);
RD_API void rd_index_free(rd_index* index);

/* ---- evaluation and experiments ---- */
/* k_values ascending; recall_out has nk entries. */
RD_API rd_status rd_eval_recall(const rd_index* index, const rd_student* student,
                                const rd_dataset* dataset, rd_part part, const size_t* k_values,
                                size_t nk, size_t workers, double* recall_out,
                                size_t* n_questions);
/* Retrieve top-k, re-rank with the teacher; accuracy_out and recall_out
 * (optional) have nk entries. */
RD_API rd_status rd_sweep_k(const rd_index* index, const rd_student* student,
                            const rd_teacher* teacher, const rd_dataset* dataset, rd_part part,
                            const size_t* k_values, size_t nk, size_t workers,
                            double* accuracy_out, double* recall_out);
/* One joint reader per (source, count) variant trained on the train part,
 * evaluated with sweep_k on eval_part. reader_dir (optional) receives
 * reader-<source>-<count>.rdrm files. */
RD_API rd_status rd_negative_study(const rd_index* index, const rd_student* student,
                                   const rd_dataset* dataset, rd_part eval_part,
                                   const rd_negative_source* sources, const size_t* counts,
                                   size_t n_variants, const size_t* k_values, size_t nk,
                                   size_t reader_hidden, const rd_train_config* reader_config,
                                   uint64_t seed, size_t workers, const char* reader_dir,
                                   char** report);
/* Pretrain then finetune with and without distillation on a generated
 * corpus. distilled / contrastive (optional) receive the selected students. */
RD_API rd_status rd_ablate(size_t n_passages, size_t n_questions, size_t latent_dim,
                           uint64_t seed, const rd_synthetic_options* options,
                           const rd_student_shape* shape, const rd_train_config* pretrain,
                           const rd_train_config* finetune, double train_fraction,
                           double valid_fraction, const size_t* k_values, size_t nk,
                           size_t workers, char** report, rd_student** distilled,
                           rd_student** contrastive);
/* Mean search latency per k over the questions of part, with recall against
 * flat_ref when given. Returns a plain-text table. */
RD_API rd_status rd_bench_index(const rd_index* index, const rd_index* flat_ref,
                                const rd_student* student, const rd_dataset* dataset,
                                rd_part part, const size_t* k_values, size_t nk, char** table);
/* Teacher re-ranking time per question for each k (fastest of repeats
 * passes) and the R^2 of a linear fit of time against k. */
RD_API rd_status rd_rerank_latency(const rd_index* index, const rd_student* student,
                                   const rd_teacher* teacher, const rd_dataset* dataset,
                                   rd_part part, const size_t* k_values, size_t nk,
                                   size_t repeats, double* ms_out, double* r_squared);
/* Continues training a joint reader on the retriever's top-k for the train
 * part and reports accuracy at k on eval_part before and after. */
RD_API rd_status rd_finetune_reader(const rd_teacher* reader, const rd_index* index,
                                    const rd_student* student, const rd_dataset* dataset,
                                    rd_part eval_part, size_t k, size_t negatives,
                                    const rd_train_config* config, uint64_t seed,
                                    size_t workers, rd_teacher** out, double* accuracy_before,
                                    double* accuracy_after);

#ifdef __cplusplus
}
#endif

#endif /* RETDISTILL_RETDISTILL_H_ */
