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

// Helpers shared by the unit tests: seeded data, independent oracles and
// scratch directories.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "common/error.hpp"
#include "common/linalg.hpp"
#include "distill/objective.hpp"
#include "encoder/student.hpp"

namespace retdistill::testing {

inline EmbeddingMatrix gaussian_matrix(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  EmbeddingMatrix m(rows, dim);
  for (std::size_t i = 0; i < rows; ++i) {
    for (auto& v : m.row(i)) v = nd(rng);
  }
  return m;
}

/// Full scan sorted by score descending then id ascending.
inline std::vector<std::pair<double, std::int64_t>> brute_force(const EmbeddingMatrix& data,
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

/// |a - n| / max(|a|, |n|) over whole vectors.
inline double gradient_rel_error(std::span<const double> analytic,
                                 std::span<const double> numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  const double scale = std::max({std::sqrt(na), std::sqrt(nn), 1e-300});
  return std::sqrt(diff) / scale;
}

/// Central differences with step 1e-5 over a parameter buffer.
inline std::vector<double> central_differences(std::span<double> params,
                                               const std::function<double()>& loss) {
  constexpr double h = 1e-5;
  std::vector<double> out;
  out.reserve(params.size());
  for (auto& v : params) {
    const double saved = v;
    v = saved + h;
    const double up = loss();
    v = saved - h;
    const double down = loss();
    v = saved;
    out.push_back((up - down) / (2.0 * h));
  }
  return out;
}

/// Central differences over both towers, question tower first.
inline std::vector<double> student_fd(TwoTowerStudent& s, const std::function<double()>& loss) {
  auto out = central_differences(s.question_map().params(), loss);
  const auto p = central_differences(s.passage_map().params(), loss);
  out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline std::vector<double> flatten(const StudentGradient& g) {
  std::vector<double> out(g.question_map);
  out.insert(out.end(), g.passage_map.begin(), g.passage_map.end());
  return out;
}

inline void randomize(std::span<double> params, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& v : params) v = u(rng);
}

/// Runs fn and returns the ErrorKind it threw, or 0 when it returned.
template <typename Fn>
int error_kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return static_cast<int>(e.kind());
  }
  return 0;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("retdistill-test-" + std::to_string(::getpid()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace retdistill::testing
