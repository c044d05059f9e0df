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
#include <filesystem>
#include <iosfwd>

#include "encoder/student.hpp"
#include "encoder/teacher.hpp"

namespace retdistill {

/// A student snapshot with the training step it was taken at and its
/// validation recall.
struct Checkpoint {
  TwoTowerStudent student;
  std::size_t step = 0;
  double validation_recall = 0.0;
};

// Model file: "RDRM", version u16, kind u8, then a kind-specific header with
// the feature width and layer shapes, then parameters as little-endian f64.
inline constexpr std::uint16_t kModelFormatVersion = 1;

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

void save_teacher(const OneTowerTeacher& teacher, const std::filesystem::path& path);
OneTowerTeacher load_teacher(const std::filesystem::path& path);

void write_checkpoint(const Checkpoint& ckpt, std::ostream& out);
Checkpoint read_checkpoint(std::istream& in);
void write_teacher(const OneTowerTeacher& teacher, std::ostream& out);
OneTowerTeacher read_teacher(std::istream& in);

}  // namespace retdistill
