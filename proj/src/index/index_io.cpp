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

#include <fstream>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "index/variants.hpp"

namespace retdistill {

namespace {
constexpr char kMagic[5] = "RDRX";
}

void write_index(const MipsIndex& index, std::ostream& out) {
  io::write_magic(out, kMagic);
  io::write_le<std::uint16_t>(out, kIndexFormatVersion);
  io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(index.kind()));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(index.dim()));
  io::write_le<std::uint64_t>(out, index.size());
  index.write_payload(out);
}

std::unique_ptr<MipsIndex> read_index(std::istream& in) {
  io::expect_magic(in, kMagic);
  const auto version = io::read_le<std::uint16_t>(in);
  if (version != kIndexFormatVersion) {
    fail(ErrorKind::kFormat, "unsupported index format version " + std::to_string(version));
  }
  const auto variant = io::read_le<std::uint8_t>(in);
  const auto dim = io::read_le<std::uint32_t>(in);
  const auto count = io::read_le<std::uint64_t>(in);
  if (dim == 0 || count == 0 || count > (1ULL << 34) / dim) {
    fail(ErrorKind::kFormat, "implausible index shape");
  }
  switch (variant) {
    case static_cast<std::uint8_t>(IndexKind::kFlatIP):
      return detail::FlatIndex::read_payload(in, dim, count);
    case static_cast<std::uint8_t>(IndexKind::kGraphIP):
      return detail::GraphIndex::read_payload(in, dim, count);
    case static_cast<std::uint8_t>(IndexKind::kSq8Flat):
      return detail::Sq8Index::read_payload(in, dim, count);
    default:
      fail(ErrorKind::kFormat, "unknown index variant " + std::to_string(variant));
  }
}

void serialize_index(const MipsIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  write_index(index, out);
  out.flush();
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

std::unique_ptr<MipsIndex> deserialize_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return read_index(in);
}

}  // namespace retdistill
