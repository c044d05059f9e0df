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

// Command-line front end. Uses only the public C interface.

#include <retdistill/retdistill.h>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fs = std::filesystem;

namespace {

// Failure while running a command (exit 1). Usage problems use UsageError.
struct RunError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(rd_status status) {
  if (status != RD_OK) {
    throw RunError(std::string(rd_status_name(status)) + ": " + rd_last_error());
  }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Dataset = std::unique_ptr<rd_dataset, Deleter<rd_dataset, rd_dataset_free>>;
using Student = std::unique_ptr<rd_student, Deleter<rd_student, rd_student_free>>;
using Teacher = std::unique_ptr<rd_teacher, Deleter<rd_teacher, rd_teacher_free>>;
using Index = std::unique_ptr<rd_index, Deleter<rd_index, rd_index_free>>;
using Text = std::unique_ptr<char, Deleter<char, rd_string_free>>;

std::string format_value(const std::string& v) { return v; }
std::string format_value(bool v) { return v ? "true" : "false"; }
// Shortest text that parses back to the same double.
std::string format_value(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
template <typename T>
  requires std::is_integral_v<T>
std::string format_value(T v) {
  return std::to_string(v);
}

std::vector<std::size_t> parse_k_list(const std::string& text, const char* flag) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size() || v == 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError(std::string("--") + flag + ": expected comma separated positive integers");
    }
  }
  if (out.empty()) throw UsageError(std::string("--") + flag + " must not be empty");
  if (!std::is_sorted(out.begin(), out.end()) ||
      std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw UsageError(std::string("--") + flag + " must be strictly ascending");
  }
  return out;
}

rd_part parse_part(const std::string& s) {
  if (s == "all") return RD_PART_ALL;
  if (s == "train") return RD_PART_TRAIN;
  if (s == "valid") return RD_PART_VALID;
  if (s == "test") return RD_PART_TEST;
  throw UsageError("--part must be one of all, train, valid, test");
}

rd_index_kind parse_kind(const std::string& s) {
  if (s == "flat") return RD_INDEX_FLAT;
  if (s == "graph") return RD_INDEX_GRAPH;
  if (s == "sq8") return RD_INDEX_SQ8;
  throw UsageError("--kind must be one of flat, graph, sq8");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RunError("io: cannot open " + path.string() + " for writing");
  out << text;
  if (!out.flush()) throw RunError("io: failed writing " + path.string());
}

std::string record_line(const std::string& metric, std::size_t k, double value, std::size_t n,
                        std::uint64_t seed, const std::string& variant) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s\t%zu\t%.6f\t%zu\t%" PRIu64 "\t%s\n", metric.c_str(), k,
                value, n, seed, variant.c_str());
  return buf;
}

const char* kRecordHeader = "metric\tk\tvalue\tn\tseed\tvariant\n";

// One subcommand: its options, the resolved-value emitters for the config
// record, and the action.
class Command {
 public:
  Command(CLI::App& root, const std::string& name, const std::string& help)
      : app_(root.add_subcommand(name, help)), name_(name) {
    app_->fallthrough(false);
    add("seed", seed, "Random seed used by every stochastic step");
    add("out-dir", out_dir, "Directory receiving all outputs");
    add("workers", workers, "Worker threads (1 gives bit-exact reproducibility)");
    app_->add_option("--config", config_path,
                     "key=value file; explicit flags override its entries");
  }

  template <typename T>
  CLI::Option* add(const std::string& key, T& var, const std::string& help) {
    fields_.emplace_back(key, [&var] { return format_value(var); });
    return app_->add_option("--" + key, var, help)->capture_default_str();
  }

  CLI::App* app() const { return app_; }
  const std::string& name() const { return name_; }

  // Resolves a possibly empty path option to a default file inside out-dir.
  std::string in_out_dir(std::string& value, const std::string& fallback) const {
    if (value.empty()) value = (fs::path(out_dir) / fallback).string();
    return value;
  }

  std::string output_path(const std::string& file) const {
    return (fs::path(out_dir) / file).string();
  }

  // Config record: every option with its resolved value, loadable by --config.
  std::string config_record() const {
    std::string out = "# retdistill " + name_ + "\n";
    for (const auto& [key, emit] : fields_) out += key + "=" + emit() + "\n";
    return out;
  }

  void emit_config(const std::string& primary_output) const {
    write_file(primary_output + ".config", config_record());
  }

  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::size_t workers = 1;
  std::string config_path;
  std::function<void()> run;

 private:
  CLI::App* app_;
  std::string name_;
  std::vector<std::pair<std::string, std::function<std::string()>>> fields_;
};

// ---- option groups shared by several commands ----

struct DatasetOpts {
  std::string corpus;
  std::string questions;
  double train_frac = 0.6;
  double valid_frac = 0.1;

  void attach(Command& c, bool with_questions = true) {
    c.add("corpus", corpus, "Corpus JSONL (default: <out-dir>/corpus.jsonl)");
    if (with_questions) {
      c.add("questions-file", questions, "Questions JSONL (default: <out-dir>/questions.jsonl)");
      c.add("train-frac", train_frac, "Fraction of questions used for training");
      c.add("valid-frac", valid_frac, "Fraction of questions used for validation");
    }
    has_questions = with_questions;
  }

  Dataset load(const Command& c) {
    c.in_out_dir(corpus, "corpus.jsonl");
    if (has_questions) c.in_out_dir(questions, "questions.jsonl");
    rd_dataset* raw = nullptr;
    check(rd_dataset_load(corpus.c_str(), has_questions ? questions.c_str() : nullptr, &raw));
    Dataset ds(raw);
    if (has_questions) check(rd_dataset_set_split(ds.get(), train_frac, valid_frac, c.seed));
    return ds;
  }

  bool has_questions = true;
};

struct SyntheticOpts {
  std::size_t passages = 1000;
  std::size_t questions = 100;
  std::size_t latent_dim = 8;
  rd_synthetic_options o{};

  SyntheticOpts() { rd_synthetic_options_default(&o); }

  void attach(Command& c) {
    c.add("passages", passages, "Number of passages");
    c.add("questions", questions, "Number of questions");
    c.add("latent-dim", latent_dim, "Latent dimension of the planted geometry");
    c.add("question-noise", o.question_noise, "Std-dev of question latent noise");
    c.add("gamma", o.gamma, "RBF teacher bandwidth");
    c.add("bins", o.bins, "Bin tokens per latent dimension");
    c.add("latent-range", o.latent_range, "Bins cover [-range, range]");
    c.add("passage-tokens-per-dim", o.passage_tokens_per_dim, "Bin tokens per dim in passages");
    c.add("question-tokens-per-dim", o.question_tokens_per_dim,
          "Bin tokens per dim in questions");
    c.add("filler-vocab", o.filler_vocab, "Filler vocabulary size");
    c.add("question-filler", o.question_filler, "Filler tokens per question");
    c.add("passage-length", o.passage_length, "Passage length after filler padding");
    c.add("chunk-size", o.chunk_size, "Maximum passage length in words");
  }
};

struct ShapeOpts {
  rd_student_shape s{};
  ShapeOpts() { rd_student_shape_default(&s); }
  void attach(Command& c) {
    c.add("d-in", s.d_in, "Hashed feature width");
    c.add("hidden", s.hidden, "Hidden width (0: linear towers)");
    c.add("d-emb", s.d_emb, "Embedding dimension");
    c.add("feature-seed", s.feature_seed, "Feature hashing seed");
  }
};

struct TrainOpts {
  rd_train_config t{};
  bool refresh = false;

  void attach(Command& c, bool full) {
    c.add("epochs", t.epochs, "Training epochs");
    c.add("lr", t.learning_rate, "Peak learning rate");
    c.add("batch-size", t.batch_size, "Mini-batch size");
    c.add("warmup", t.warmup_steps, "Linear warmup steps");
    c.add("weight-decay", t.weight_decay, "Decoupled weight decay");
    c.add("beta1", t.beta1, "Adam beta1");
    c.add("beta2", t.beta2, "Adam beta2");
    c.add("epsilon", t.epsilon, "Adam epsilon");
    if (!full) return;
    c.add("temperature", t.temperature, "Distillation temperature");
    c.add("kd-weight", t.kd_weight, "Weight of the distillation loss");
    c.add("contrastive-weight", t.contrastive_weight, "Weight of the in-batch contrastive loss");
    c.add("passages-per-question", t.passages_per_question, "Candidates per training question");
    c.add("validation-fraction", t.validation_fraction,
          "Share of validation questions used for checkpoint selection");
    c.add("selection-k", t.selection_k, "Checkpoint selection metric is recall@k");
    c.add("refresh-candidates", refresh, "Re-retrieve candidates every epoch");
  }

  rd_train_config resolved(std::uint64_t seed) const {
    rd_train_config out = t;
    out.refresh_candidates = refresh ? 1 : 0;
    out.seed = seed;
    return out;
  }
};

struct GraphOpts {
  rd_graph_params g{};
  GraphOpts() { rd_graph_params_default(&g); }
  void attach(Command& c) {
    c.add("neighbors", g.neighbors_per_node, "Graph: maximum neighbours per node");
    c.add("construction-depth", g.construction_depth, "Graph: candidate list during build");
    c.add("search-depth", g.search_depth, "Graph: candidate list during search");
    c.add("prune-slack", g.prune_slack, "Graph: neighbour selection slack (>= 1)");
  }
  rd_graph_params resolved(std::uint64_t seed) const {
    rd_graph_params out = g;
    out.level_seed = seed;
    return out;
  }
};

Student load_student(const std::string& path) {
  rd_student* raw = nullptr;
  check(rd_student_load(path.c_str(), &raw, nullptr, nullptr));
  return Student(raw);
}

Teacher load_teacher(const std::string& path) {
  rd_teacher* raw = nullptr;
  check(rd_teacher_load(path.c_str(), &raw));
  return Teacher(raw);
}

Index load_index(const std::string& path) {
  rd_index* raw = nullptr;
  check(rd_index_load(path.c_str(), &raw));
  return Index(raw);
}

std::string take(char* raw) {
  Text t(raw);
  return t ? std::string(t.get()) : std::string();
}

void print(const std::string& text) { std::cout << text << std::flush; }

// ---- subcommands ----

void add_gen_corpus(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto c = std::make_unique<Command>(root, "gen-corpus",
                                     "Generate a synthetic corpus, questions and RBF teacher");
  auto syn = std::make_shared<SyntheticOpts>();
  syn->attach(*c);
  auto* cp = c.get();
  c->run = [cp, syn] {
    rd_dataset* ds_raw = nullptr;
    rd_teacher* t_raw = nullptr;
    check(rd_dataset_generate(syn->passages, syn->questions, syn->latent_dim, cp->seed, &syn->o,
                              &ds_raw, &t_raw));
    Dataset ds(ds_raw);
    Teacher teacher(t_raw);
    const auto corpus = cp->output_path("corpus.jsonl");
    check(rd_dataset_save(ds.get(), corpus.c_str(), cp->output_path("questions.jsonl").c_str()));
    check(rd_teacher_save(teacher.get(), cp->output_path("teacher.rdrm").c_str()));
    cp->emit_config(corpus);
  };
  cmds.push_back(std::move(c));
}

void add_pretrain(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto c = std::make_unique<Command>(root, "pretrain",
                                     "Contrastive pretraining of a two-tower student");
  struct Opts {
    DatasetOpts data;
    ShapeOpts shape;
    TrainOpts train;
    std::string init;
    std::string output = "pretrained.rdrm";
  };
  auto o = std::make_shared<Opts>();
  rd_pretrain_config_default(&o->train.t);
  o->data.attach(*c);
  o->shape.attach(*c);
  o->train.attach(*c, false);
  c->add("init", o->init, "Start from this checkpoint instead of a fresh student");
  c->add("output", o->output, "Checkpoint file name inside out-dir");
  auto* cp = c.get();
  c->run = [cp, o] {
    auto ds = o->data.load(*cp);
    Student init;
    if (o->init.empty()) {
      rd_student* raw = nullptr;
      check(rd_student_create(&o->shape.s, cp->seed, &raw));
      init.reset(raw);
    } else {
      init = load_student(o->init);
    }
    const auto cfg = o->train.resolved(cp->seed);
    rd_student* raw = nullptr;
    char* log = nullptr;
    check(rd_pretrain(init.get(), ds.get(), &cfg, &raw, &log));
    Student out(raw);
    const auto path = cp->output_path(o->output);
    check(rd_student_save(out.get(), path.c_str(), 0, 0.0));
    write_file(path + ".log", take(log));
    cp->emit_config(path);
  };
  cmds.push_back(std::move(c));
}

void add_distill(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto c = std::make_unique<Command>(root, "distill",
                                     "Finetune a student against a one-tower teacher");
  struct Opts {
    DatasetOpts data;
    TrainOpts train;
    std::string student, teacher, candidate_index;
    std::string output = "distilled.rdrm";
  };
  auto o = std::make_shared<Opts>();
  rd_train_config_default(&o->train.t);
  o->train.refresh = o->train.t.refresh_candidates != 0;
  o->data.attach(*c);
  o->train.attach(*c, true);
  c->add("student", o->student, "Initial checkpoint (default: <out-dir>/pretrained.rdrm)");
  c->add("teacher", o->teacher, "Teacher model (default: <out-dir>/teacher.rdrm)");
  c->add("candidate-index", o->candidate_index,
         "Index over the initial student (default: exact index built on the fly)");
  c->add("output", o->output, "Checkpoint file name inside out-dir");
  auto* cp = c.get();
  c->run = [cp, o] {
    auto ds = o->data.load(*cp);
    auto init = load_student(cp->in_out_dir(o->student, "pretrained.rdrm"));
    auto teacher = load_teacher(cp->in_out_dir(o->teacher, "teacher.rdrm"));
    Index candidates;
    if (!o->candidate_index.empty()) candidates = load_index(o->candidate_index);
    const auto cfg = o->train.resolved(cp->seed);
    rd_student* raw = nullptr;
    std::size_t step = 0;
    double recall = 0.0;
    char* log = nullptr;
    check(rd_distill(init.get(), teacher.get(), ds.get(), candidates.get(), &cfg, cp->workers,
                     &raw, &step, &recall, &log));
    Student best(raw);
    const auto path = cp->output_path(o->output);
    check(rd_student_save(best.get(), path.c_str(), step, recall));
    write_file(path + ".log", take(log));
    cp->emit_config(path);
    std::printf("best step %zu, validation recall %.6f\n", step, recall);
  };
  cmds.push_back(std::move(c));
}

void add_build_index(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto c = std::make_unique<Command>(root, "build-index",
                                     "Embed the corpus and build a search index");
  struct Opts {
    DatasetOpts data;
    GraphOpts graph;
    std::string student, kind = "flat", output;
  };
  auto o = std::make_shared<Opts>();
  o->data.attach(*c, false);
  o->graph.attach(*c);
  c->add("student", o->student, "Student checkpoint (default: <out-dir>/distilled.rdrm)");
  c->add("kind", o->kind, "flat, graph or sq8");
  c->add("output", o->output, "Index file name inside out-dir (default: index-<kind>.rdrx)");
  auto* cp = c.get();
  c->run = [cp, o] {
    const auto kind = parse_kind(o->kind);
    auto ds = o->data.load(*cp);
    auto student = load_student(cp->in_out_dir(o->student, "distilled.rdrm"));
    if (o->output.empty()) o->output = "index-" + o->kind + ".rdrx";
    const auto params = o->graph.resolved(cp->seed);
    rd_index* raw = nullptr;
    check(rd_index_build(student.get(), ds.get(), kind, &params, cp->workers, &raw));
    Index index(raw);
    const auto path = cp->output_path(o->output);
    check(rd_index_save(index.get(), path.c_str()));
    cp->emit_config(path);
  };
  cmds.push_back(std::move(c));
}

void add_search(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto c = std::make_unique<Command>(root, "search", "Retrieve passages for a query");
  struct Opts {
    std::string index, student, query, output = "search.tsv";
    std::size_t k = 10;
  };
  auto o = std::make_shared<Opts>();
  c->add("index", o->index, "Index file (default: <out-dir>/index-flat.rdrx)");
  c->add("student", o->student, "Student checkpoint (default: <out-dir>/distilled.rdrm)");
  c->add("query", o->query, "Query text")->required();
  c->add("k", o->k, "Number of results");
  c->add("output", o->output, "Result file name inside out-dir");
  auto* cp = c.get();
  c->run = [cp, o] {
    auto index = load_index(cp->in_out_dir(o->index, "index-flat.rdrx"));
    auto student = load_student(cp->in_out_dir(o->student, "distilled.rdrm"));
    std::vector<double> q(rd_student_dim(student.get()));
    check(rd_student_embed(student.get(), o->query.c_str(), 1, q.data(), q.size()));
    std::vector<std::int64_t> ids(o->k);
    std::vector<double> scores(o->k);
    std::size_t n = 0;
    check(rd_index_search(index.get(), q.data(), q.size(), o->k, ids.data(), scores.data(), &n));
    std::string text = "rank\tid\tscore\n";
    char buf[128];
    for (std::size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%zu\t%" PRId64 "\t%.9g\n", i + 1, ids[i], scores[i]);
      text += buf;
    }
    const auto path = cp->output_path(o->output);
    write_file(path, text);
    cp->emit_config(path);
    print(text);
  };
  cmds.push_back(std::move(c));
}

void add_eval_recall(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto c = std::make_unique<Command>(root, "eval-recall", "Recall@k of a student and index");
  struct Opts {
    DatasetOpts data;
    std::string index, student, part = "test", k = "1,20,50,100", output = "recall.tsv";
    std::string variant;
  };
  auto o = std::make_shared<Opts>();
  o->data.attach(*c);
  c->add("index", o->index, "Index file (default: <out-dir>/index-flat.rdrx)");
  c->add("student", o->student, "Student checkpoint (default: <out-dir>/distilled.rdrm)");
  c->add("part", o->part, "Question subset: all, train, valid or test");
  c->add("k", o->k, "Comma separated ascending k values");
  c->add("variant", o->variant, "Variant label in the report (default: student file stem)");
  c->add("output", o->output, "Report file name inside out-dir");
  auto* cp = c.get();
  c->run = [cp, o] {
    const auto ks = parse_k_list(o->k, "k");
    const auto part = parse_part(o->part);
    auto ds = o->data.load(*cp);
    auto index = load_index(cp->in_out_dir(o->index, "index-flat.rdrx"));
    auto student = load_student(cp->in_out_dir(o->student, "distilled.rdrm"));
    if (o->variant.empty()) o->variant = fs::path(o->student).stem().string();
    std::vector<double> recall(ks.size());
    std::size_t n = 0;
    check(rd_eval_recall(index.get(), student.get(), ds.get(), part, ks.data(), ks.size(),
                         cp->workers, recall.data(), &n));
    std::string text = kRecordHeader;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      text += record_line("recall", ks[i], recall[i], n, cp->seed, o->variant);
    }
    const auto path = cp->output_path(o->output);
    write_file(path, text);
    cp->emit_config(path);
    print(text);
  };
  cmds.push_back(std::move(c));
}

void add_sweep_k(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto c = std::make_unique<Command>(root, "sweep-k",
                                     "Retrieve top-k, re-rank with the teacher, sweep k");
  struct Opts {
    DatasetOpts data;
    std::string index, student, teacher, part = "test", k = "1,2,5,10,20,50,100";
    std::string output = "sweep.tsv", variant = "sweep";
  };
  auto o = std::make_shared<Opts>();
  o->data.attach(*c);
  c->add("index", o->index, "Index file (default: <out-dir>/index-flat.rdrx)");
  c->add("student", o->student, "Student checkpoint (default: <out-dir>/distilled.rdrm)");
  c->add("teacher", o->teacher, "Re-ranking model (default: <out-dir>/teacher.rdrm)");
  c->add("part", o->part, "Question subset: all, train, valid or test");
  c->add("k", o->k, "Comma separated ascending k values");
  c->add("variant", o->variant, "Variant label in the report");
  c->add("output", o->output, "Curve file name inside out-dir");
  auto* cp = c.get();
  c->run = [cp, o] {
    auto ks = parse_k_list(o->k, "k");
    const auto part = parse_part(o->part);
    auto ds = o->data.load(*cp);
    auto index = load_index(cp->in_out_dir(o->index, "index-flat.rdrx"));
    auto student = load_student(cp->in_out_dir(o->student, "distilled.rdrm"));
    auto teacher = load_teacher(cp->in_out_dir(o->teacher, "teacher.rdrm"));
    std::vector<double> acc(ks.size()), rec(ks.size());
    check(rd_sweep_k(index.get(), student.get(), teacher.get(), ds.get(), part, ks.data(),
                     ks.size(), cp->workers, acc.data(), rec.data()));
    const auto n = rd_dataset_num_questions(ds.get(), part);
    std::string text = kRecordHeader;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      text += record_line("accuracy", ks[i], acc[i], n, cp->seed, o->variant);
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
      text += record_line("retrieval_recall", ks[i], rec[i], n, cp->seed, o->variant);
    }
    const auto path = cp->output_path(o->output);
    write_file(path, text);
    cp->emit_config(path);
    print(text);
  };
  cmds.push_back(std::move(c));
}

void add_neg_study(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto c = std::make_unique<Command>(root, "neg-study",
                                     "Train joint readers with random vs retrieved negatives");
  struct Opts {
    DatasetOpts data;
    TrainOpts reader;
    std::string index, student, part = "test", k = "1,2,5,10,20,50,100";
    std::string variants = "random:23,random:67,retrieved:23,retrieved:67";
    std::string output = "neg-study.tsv";
    std::size_t reader_hidden = 64;
  };
  auto o = std::make_shared<Opts>();
  rd_reader_config_default(&o->reader.t);
  o->data.attach(*c);
  o->reader.attach(*c, false);
  c->add("index", o->index, "Index file (default: <out-dir>/index-flat.rdrx)");
  c->add("student", o->student, "Student checkpoint (default: <out-dir>/distilled.rdrm)");
  c->add("part", o->part, "Evaluation question subset");
  c->add("k", o->k, "Comma separated ascending k values");
  c->add("variants", o->variants, "Comma separated source:count pairs");
  c->add("reader-hidden", o->reader_hidden, "Hidden width of each joint reader");
  c->add("output", o->output, "Report file name inside out-dir");
  auto* cp = c.get();
  c->run = [cp, o] {
    const auto ks = parse_k_list(o->k, "k");
    const auto part = parse_part(o->part);
    std::vector<rd_negative_source> sources;
    std::vector<std::size_t> counts;
    std::stringstream ss(o->variants);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      const auto src = item.substr(0, colon);
      if (colon == std::string::npos || (src != "random" && src != "retrieved")) {
        throw UsageError("--variants: expected random:<n> or retrieved:<n>, got '" + item + "'");
      }
      sources.push_back(src == "random" ? RD_NEGATIVES_RANDOM : RD_NEGATIVES_RETRIEVED);
      counts.push_back(parse_k_list(item.substr(colon + 1), "variants").front());
    }
    if (sources.empty()) throw UsageError("--variants must not be empty");
    auto ds = o->data.load(*cp);
    auto index = load_index(cp->in_out_dir(o->index, "index-flat.rdrx"));
    auto student = load_student(cp->in_out_dir(o->student, "distilled.rdrm"));
    const auto cfg = o->reader.resolved(cp->seed);
    char* report = nullptr;
    check(rd_negative_study(index.get(), student.get(), ds.get(), part, sources.data(),
                            counts.data(), sources.size(), ks.data(), ks.size(),
                            o->reader_hidden, &cfg, cp->seed, cp->workers, cp->out_dir.c_str(),
                            &report));
    const auto text = take(report);
    const auto path = cp->output_path(o->output);
    write_file(path, text);
    cp->emit_config(path);
    print(text);
  };
  cmds.push_back(std::move(c));
}

void add_ablate(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto c = std::make_unique<Command>(
      root, "ablate", "Distillation vs contrastive-only finetuning from one pretrained student");
  struct Opts {
    SyntheticOpts syn;
    ShapeOpts shape;
    rd_train_config pre{};
    TrainOpts fine;
    double train_frac = 0.6, valid_frac = 0.1;
    std::string k = "1,20,50,100", output = "ablate.tsv";
  };
  auto o = std::make_shared<Opts>();
  o->syn.passages = 2000;
  o->syn.questions = 200;
  rd_pretrain_config_default(&o->pre);
  rd_train_config_default(&o->fine.t);
  o->syn.attach(*c);
  o->shape.attach(*c);
  c->add("pretrain-epochs", o->pre.epochs, "Contrastive pretraining epochs");
  c->add("pretrain-lr", o->pre.learning_rate, "Pretraining learning rate");
  o->fine.attach(*c, false);
  c->add("temperature", o->fine.t.temperature, "Distillation temperature");
  c->add("passages-per-question", o->fine.t.passages_per_question,
         "Candidates per training question");
  c->add("train-frac", o->train_frac, "Fraction of questions used for training");
  c->add("valid-frac", o->valid_frac, "Fraction of questions used for validation");
  c->add("k", o->k, "Comma separated ascending k values");
  c->add("output", o->output, "Report file name inside out-dir");
  auto* cp = c.get();
  c->run = [cp, o] {
    const auto ks = parse_k_list(o->k, "k");
    rd_train_config pre = o->pre;
    pre.seed = cp->seed;
    const auto fine = o->fine.resolved(cp->seed);
    char* report = nullptr;
    rd_student* kd_raw = nullptr;
    rd_student* cl_raw = nullptr;
    check(rd_ablate(o->syn.passages, o->syn.questions, o->syn.latent_dim, cp->seed, &o->syn.o,
                    &o->shape.s, &pre, &fine, o->train_frac, o->valid_frac, ks.data(),
                    ks.size(), cp->workers, &report, &kd_raw, &cl_raw));
    Student kd(kd_raw), cl(cl_raw);
    const auto text = take(report);
    check(rd_student_save(kd.get(), cp->output_path("ablate-distilled.rdrm").c_str(), 0, 0.0));
    check(rd_student_save(cl.get(), cp->output_path("ablate-contrastive.rdrm").c_str(), 0, 0.0));
    const auto path = cp->output_path(o->output);
    write_file(path, text);
    cp->emit_config(path);
    print(text);
  };
  cmds.push_back(std::move(c));
}

void add_bench_index(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto c = std::make_unique<Command>(root, "bench-index",
                                     "Search latency per k, and teacher re-ranking latency");
  struct Opts {
    DatasetOpts data;
    std::string index, flat_ref, student, teacher, part = "test", k = "1,10,100";
    std::string rerank_k = "1,10,20,30,40,50", output = "bench.txt";
    std::size_t repeats = 3;
  };
  auto o = std::make_shared<Opts>();
  o->data.attach(*c);
  c->add("index", o->index, "Index file (default: <out-dir>/index-flat.rdrx)");
  c->add("flat-ref", o->flat_ref, "Exact index for recall (default: built from the student)");
  c->add("student", o->student, "Student checkpoint (default: <out-dir>/distilled.rdrm)");
  c->add("teacher", o->teacher, "Re-ranking model; adds a re-ranking latency table when set");
  c->add("part", o->part, "Question subset used as queries");
  c->add("k", o->k, "Comma separated ascending k values for search");
  c->add("rerank-k", o->rerank_k, "Comma separated ascending k values for re-ranking");
  c->add("repeats", o->repeats, "Re-ranking timing repeats");
  c->add("output", o->output, "Table file name inside out-dir");
  auto* cp = c.get();
  c->run = [cp, o] {
    const auto ks = parse_k_list(o->k, "k");
    const auto rks = parse_k_list(o->rerank_k, "rerank-k");
    const auto part = parse_part(o->part);
    auto ds = o->data.load(*cp);
    auto index = load_index(cp->in_out_dir(o->index, "index-flat.rdrx"));
    auto student = load_student(cp->in_out_dir(o->student, "distilled.rdrm"));
    Index flat;
    if (!o->flat_ref.empty()) {
      flat = load_index(o->flat_ref);
    } else if (rd_index_get_kind(index.get()) != RD_INDEX_FLAT) {
      rd_index* raw = nullptr;
      check(rd_index_build(student.get(), ds.get(), RD_INDEX_FLAT, nullptr, cp->workers, &raw));
      flat.reset(raw);
    }
    char* table = nullptr;
    check(rd_bench_index(index.get(), flat.get(), student.get(), ds.get(), part, ks.data(),
                         ks.size(), &table));
    std::string text = take(table);
    if (!o->teacher.empty()) {
      auto teacher = load_teacher(o->teacher);
      std::vector<double> ms(rks.size());
      double r2 = 0.0;
      check(rd_rerank_latency(index.get(), student.get(), teacher.get(), ds.get(), part,
                              rks.data(), rks.size(), o->repeats, ms.data(), &r2));
      text += "\nrerank_k\tmean_ms\n";
      char buf[128];
      for (std::size_t i = 0; i < rks.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu\t%.6f\n", rks[i], ms[i]);
        text += buf;
      }
      std::snprintf(buf, sizeof buf, "linear_fit_r2\t%.6f\n", r2);
      text += buf;
    }
    const auto path = cp->output_path(o->output);
    write_file(path, text);
    cp->emit_config(path);
    print(text);
  };
  cmds.push_back(std::move(c));
}

void add_finetune_reader(CLI::App& root, std::vector<std::unique_ptr<Command>>& cmds) {
  auto c = std::make_unique<Command>(
      root, "finetune-reader", "Adapt a joint reader to a new retriever's top-k passages");
  struct Opts {
    DatasetOpts data;
    TrainOpts reader;
    std::string reader_path, index, student, part = "test", output = "reader-finetuned.rdrm";
    std::size_t k = 20, negatives = 23;
  };
  auto o = std::make_shared<Opts>();
  rd_reader_config_default(&o->reader.t);
  o->data.attach(*c);
  o->reader.attach(*c, false);
  c->add("reader", o->reader_path, "Joint reader model")->required();
  c->add("index", o->index, "Index file (default: <out-dir>/index-flat.rdrx)");
  c->add("student", o->student, "Student checkpoint (default: <out-dir>/distilled.rdrm)");
  c->add("part", o->part, "Evaluation question subset");
  c->add("k", o->k, "Passages retrieved per question");
  c->add("negatives", o->negatives, "Retrieved negatives per training question");
  c->add("output", o->output, "Reader file name inside out-dir");
  auto* cp = c.get();
  c->run = [cp, o] {
    const auto part = parse_part(o->part);
    auto ds = o->data.load(*cp);
    auto reader = load_teacher(o->reader_path);
    auto index = load_index(cp->in_out_dir(o->index, "index-flat.rdrx"));
    auto student = load_student(cp->in_out_dir(o->student, "distilled.rdrm"));
    const auto cfg = o->reader.resolved(cp->seed);
    rd_teacher* raw = nullptr;
    double before = 0.0, after = 0.0;
    check(rd_finetune_reader(reader.get(), index.get(), student.get(), ds.get(), part, o->k,
                             o->negatives, &cfg, cp->seed, cp->workers, &raw, &before, &after));
    Teacher tuned(raw);
    const auto path = cp->output_path(o->output);
    check(rd_teacher_save(tuned.get(), path.c_str()));
    const auto n = rd_dataset_num_questions(ds.get(), part);
    std::string text = kRecordHeader;
    text += record_line("accuracy", o->k, before, n, cp->seed, "before-finetune");
    text += record_line("accuracy", o->k, after, n, cp->seed, "after-finetune");
    write_file(path + ".tsv", text);
    cp->emit_config(path);
    print(text);
  };
  cmds.push_back(std::move(c));
}

// ---- config merging ----

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RunError("io: cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto key = trim(line.substr(0, eq));
    if (key.empty() || key == "config") {
      throw UsageError(path + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
    }
    out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return out;
}

bool flag_given(const std::vector<std::string>& args, const std::string& key) {
  const auto flag = "--" + key;
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Appends config entries that are not given explicitly; explicit flags win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  for (const auto& [key, value] : read_config(path)) {
    if (!flag_given(args, key)) args.push_back("--" + key + "=" + value);
  }
  return args;
}

int run(int argc, char** argv) {
  CLI::App root{"Retriever distillation toolkit"};
  root.require_subcommand(1);
  root.set_version_flag("--version", rd_version());
  std::vector<std::unique_ptr<Command>> cmds;
  add_gen_corpus(root, cmds);
  add_pretrain(root, cmds);
  add_distill(root, cmds);
  add_build_index(root, cmds);
  add_search(root, cmds);
  add_eval_recall(root, cmds);
  add_sweep_k(root, cmds);
  add_neg_study(root, cmds);
  add_ablate(root, cmds);
  add_bench_index(root, cmds);
  add_finetune_reader(root, cmds);

  std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty() && !args[0].empty() && args[0][0] != '-' &&
      std::none_of(cmds.begin(), cmds.end(), [&](const auto& c) { return c->name() == args[0]; })) {
    std::cerr << "usage error: unknown subcommand '" << args[0] << "' (see --help)\n";
    return 2;
  }
  try {
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    root.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return root.exit(e);
    std::cerr << "usage error: " << e.what() << " (see --help)\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const RunError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  for (const auto& c : cmds) {
    if (!c->app()->parsed()) continue;
    try {
      if (c->workers < 1) throw UsageError("--workers must be >= 1");
      std::error_code ec;
      fs::create_directories(c->out_dir, ec);
      if (ec) throw RunError("io: cannot create " + c->out_dir + ": " + ec.message());
      c->run();
      return 0;
    } catch (const UsageError& e) {
      std::cerr << "usage error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
