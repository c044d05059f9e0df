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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "common/error.hpp"

namespace retdistill {

using Embedding = std::vector<double>;

// Plain left-to-right accumulation. Every inner product in the library goes
// through this (or a loop with the identical per-element order) so scores are
// reproducible bit-for-bit across code paths.
inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(std::span<const double> a) { return dot(a, a); }

inline bool all_finite(std::span<const double> a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

/// Row-major dense matrix of embeddings, one row per item.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim)
      : rows_(rows), dim_(dim), data_(rows * dim, 0.0) {}
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<double> data)
      : rows_(rows), dim_(dim), data_(std::move(data)) {
    require(data_.size() == rows_ * dim_, "embedding buffer size mismatch");
  }

  static EmbeddingMatrix from_rows(std::span<const Embedding> rows) {
    require(!rows.empty(), "at least one embedding is required");
    const std::size_t dim = rows.front().size();
    require(dim > 0, "embedding dimension must be positive");
    EmbeddingMatrix m(rows.size(), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].size() == dim, "embedding dimension mismatch at row " +
                                         std::to_string(i));
      std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * dim);
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  const std::vector<double>& data() const { return data_; }

  void append_row(std::span<const double> r) {
    require(r.size() == dim_, "embedding dimension mismatch");
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace retdistill
