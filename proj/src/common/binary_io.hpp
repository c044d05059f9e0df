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

// Little-endian primitive readers/writers shared by the model and index file
// formats. Doubles are written as their IEEE-754 bit pattern.

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "common/error.hpp"

namespace retdistill::io {

template <typename T>
  requires std::is_integral_v<T>
void write_le(std::ostream& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  std::array<char, sizeof(T)> buf{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<char>((u >> (8 * i)) & 0xFFu);
  }
  out.write(buf.data(), buf.size());
}

inline void write_f64(std::ostream& out, double value) {
  write_le(out, std::bit_cast<std::uint64_t>(value));
}

template <typename T>
  requires std::is_integral_v<T>
T read_le(std::istream& in) {
  using U = std::make_unsigned_t<T>;
  std::array<char, sizeof(T)> buf{};
  in.read(buf.data(), buf.size());
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    fail(ErrorKind::kFormat, "unexpected end of file");
  }
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    u |= static_cast<U>(static_cast<unsigned char>(buf[i])) << (8 * i);
  }
  return static_cast<T>(u);
}

inline double read_f64(std::istream& in) {
  return std::bit_cast<double>(read_le<std::uint64_t>(in));
}

inline void write_magic(std::ostream& out, const char (&magic)[5]) {
  out.write(magic, 4);
}

inline void expect_magic(std::istream& in, const char (&magic)[5]) {
  char buf[4] = {};
  in.read(buf, 4);
  if (in.gcount() != 4 || std::string(buf, 4) != std::string(magic, 4)) {
    fail(ErrorKind::kFormat, std::string("bad magic, expected ") + magic);
  }
}

}  // namespace retdistill::io
