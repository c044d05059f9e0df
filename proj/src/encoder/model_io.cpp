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

#include "encoder/model_io.hpp"

#include <fstream>

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace retdistill {

namespace {

constexpr char kMagic[5] = "RDRM";

enum class ModelKind : std::uint8_t { kStudent = 0, kJointMlp = 1, kRbfOracle = 2 };

void write_header(std::ostream& out, ModelKind kind) {
  io::write_magic(out, kMagic);
  io::write_le<std::uint16_t>(out, kModelFormatVersion);
  io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(kind));
}

ModelKind read_header(std::istream& in) {
  io::expect_magic(in, kMagic);
  const auto version = io::read_le<std::uint16_t>(in);
  if (version != kModelFormatVersion) {
    fail(ErrorKind::kFormat, "unsupported model format version " + std::to_string(version));
  }
  const auto kind = io::read_le<std::uint8_t>(in);
  if (kind > 2) fail(ErrorKind::kFormat, "unknown model kind " + std::to_string(kind));
  return static_cast<ModelKind>(kind);
}

void write_mlp(std::ostream& out, const Mlp& mlp) {
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(mlp.widths().size()));
  for (auto w : mlp.widths()) io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(w));
  for (double p : mlp.params()) io::write_f64(out, p);
}

Mlp read_mlp(std::istream& in) {
  const auto n = io::read_le<std::uint32_t>(in);
  if (n < 2 || n > 64) fail(ErrorKind::kFormat, "implausible layer count");
  std::vector<std::size_t> widths(n);
  std::size_t total = 0;
  for (auto& w : widths) {
    w = io::read_le<std::uint32_t>(in);
    if (w == 0) fail(ErrorKind::kFormat, "zero layer width");
  }
  for (std::size_t l = 0; l + 1 < n; ++l) total += widths[l] * widths[l + 1] + widths[l + 1];
  std::vector<double> params(total);
  for (auto& p : params) p = io::read_f64(in);
  return Mlp::from_params(std::move(widths), std::move(params));
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

}  // namespace

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  const auto& s = ckpt.student;
  write_header(out, ModelKind::kStudent);
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.features().dim()));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.d_emb()));
  io::write_le<std::uint64_t>(out, s.features().seed());
  io::write_le<std::uint64_t>(out, ckpt.step);
  io::write_f64(out, ckpt.validation_recall);
  write_mlp(out, s.question_map());
  write_mlp(out, s.passage_map());
}

Checkpoint read_checkpoint(std::istream& in) {
  if (read_header(in) != ModelKind::kStudent) {
    fail(ErrorKind::kFormat, "model file does not hold a two-tower student");
  }
  const auto d_in = io::read_le<std::uint32_t>(in);
  const auto d_emb = io::read_le<std::uint32_t>(in);
  const auto feature_seed = io::read_le<std::uint64_t>(in);
  const auto step = io::read_le<std::uint64_t>(in);
  const double recall = io::read_f64(in);
  auto q = read_mlp(in);
  auto p = read_mlp(in);
  if (q.input_dim() != d_in || p.input_dim() != d_in || q.output_dim() != d_emb ||
      p.output_dim() != d_emb) {
    fail(ErrorKind::kFormat, "layer shapes disagree with the header");
  }
  try {
    return Checkpoint{TwoTowerStudent(FeatureExtractor(d_in, feature_seed),
                                      std::move(q), std::move(p)),
                      static_cast<std::size_t>(step), recall};
  } catch (const Error& e) {
    fail(ErrorKind::kFormat, e.what());
  }
}

void write_teacher(const OneTowerTeacher& teacher, std::ostream& out) {
  if (const auto* joint = std::get_if<JointMlp>(&teacher)) {
    write_header(out, ModelKind::kJointMlp);
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(joint->features().dim()));
    io::write_le<std::uint64_t>(out, joint->features().seed());
    write_mlp(out, joint->net());
    return;
  }
  const auto& rbf = std::get<RbfOracle>(teacher);
  write_header(out, ModelKind::kRbfOracle);
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(rbf.latent_dim()));
  io::write_f64(out, rbf.gamma());
  io::write_le<std::uint64_t>(out, rbf.num_passages());
  io::write_le<std::uint64_t>(out, rbf.num_questions());
  for (double v : rbf.passage_latents()) io::write_f64(out, v);
  for (double v : rbf.question_latents()) io::write_f64(out, v);
}

OneTowerTeacher read_teacher(std::istream& in) {
  const auto kind = read_header(in);
  if (kind == ModelKind::kJointMlp) {
    const auto d_in = io::read_le<std::uint32_t>(in);
    const auto feature_seed = io::read_le<std::uint64_t>(in);
    auto net = read_mlp(in);
    try {
      return JointMlp(FeatureExtractor(d_in, feature_seed), std::move(net));
    } catch (const Error& e) {
      fail(ErrorKind::kFormat, e.what());
    }
  }
  if (kind != ModelKind::kRbfOracle) {
    fail(ErrorKind::kFormat, "model file does not hold a teacher");
  }
  const auto dim = io::read_le<std::uint32_t>(in);
  const double gamma = io::read_f64(in);
  const auto np = io::read_le<std::uint64_t>(in);
  const auto nq = io::read_le<std::uint64_t>(in);
  if (dim == 0 || np > (1ULL << 32) || nq > (1ULL << 32)) {
    fail(ErrorKind::kFormat, "implausible latent table shape");
  }
  std::vector<double> pl(np * dim), ql(nq * dim);
  for (auto& v : pl) v = io::read_f64(in);
  for (auto& v : ql) v = io::read_f64(in);
  return RbfOracle(gamma, dim, std::move(pl), std::move(ql));
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_checkpoint(ckpt, out);
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_checkpoint(in);
}

void save_teacher(const OneTowerTeacher& teacher, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_teacher(teacher, out);
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

OneTowerTeacher load_teacher(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_teacher(in);
}

}  // namespace retdistill
