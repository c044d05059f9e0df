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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common/linalg.hpp"

namespace retdistill {

enum class IndexKind : std::uint8_t { kFlatIP = 0, kGraphIP = 1, kSq8Flat = 2 };

std::string index_kind_name(IndexKind kind);
IndexKind parse_index_kind(const std::string& name);

/// Top-k ids with their inner-product scores, best first.
struct SearchResult {
  std::vector<std::int64_t> ids;
  std::vector<double> scores;
};

struct GraphParams {
  std::size_t neighbors_per_node = 512;
  std::size_t construction_depth = 200;
  std::size_t search_depth = 128;
  std::uint64_t level_seed = 0;
  // Neighbour-selection slack on squared distances; 1.0 is the classic
  // HNSW heuristic, larger keeps more edges.
  double prune_slack = 1.2;

  void validate() const;
};

class MipsIndex {
 public:
  virtual ~MipsIndex() = default;

  virtual IndexKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t size() const = 0;

  /// k > size() returns every item. Throws on a query of the wrong dimension.
  virtual SearchResult search(std::span<const double> query, std::size_t k) const = 0;

  virtual void write_payload(std::ostream& out) const = 0;
};

std::unique_ptr<MipsIndex> build_flat(const EmbeddingMatrix& embeddings);
std::unique_ptr<MipsIndex> build_graph(const EmbeddingMatrix& embeddings,
                                       const GraphParams& params = {});
std::unique_ptr<MipsIndex> build_sq8(const EmbeddingMatrix& embeddings);
std::unique_ptr<MipsIndex> build_index(IndexKind kind,
                                       const EmbeddingMatrix& embeddings,
                                       const GraphParams& params = {});

// Index file: "RDRX", version u16, variant u8, d_emb u32, count u64, payload.
inline constexpr std::uint16_t kIndexFormatVersion = 1;

void write_index(const MipsIndex& index, std::ostream& out);
std::unique_ptr<MipsIndex> read_index(std::istream& in);
void serialize_index(const MipsIndex& index, const std::filesystem::path& path);
std::unique_ptr<MipsIndex> deserialize_index(const std::filesystem::path& path);

/// [x ; sqrt(max_norm^2 - |x|^2)]. Queries are augmented with a trailing 0, so
/// |q' - x'|^2 = |q|^2 + max_norm^2 - 2 q.x and L2 order equals inner-product
/// order.
std::vector<double> max_norm_augment(std::span<const double> x, double max_norm);

/// Per-dimension 8-bit affine codec trained on min/max of the data.
class ScalarQuantizer {
 public:
  static ScalarQuantizer train(const EmbeddingMatrix& data);
  ScalarQuantizer(std::vector<double> mins, std::vector<double> maxs);

  std::size_t dim() const { return mins_.size(); }
  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }
  double step(std::size_t d) const { return steps_[d]; }

  std::uint8_t encode(std::size_t d, double v) const;
  double decode(std::size_t d, std::uint8_t code) const {
    return mins_[d] + static_cast<double>(code) * steps_[d];
  }
  std::vector<std::uint8_t> encode(std::span<const double> v) const;
  std::vector<double> decode(std::span<const std::uint8_t> codes) const;

 private:
  std::vector<double> mins_, maxs_, steps_;
};

struct BenchRow {
  std::string variant;
  std::size_t k = 0;
  double mean_ms = 0.0;
  // Mean overlap of the returned ids with the flat top-k; nullopt without a
  // reference.
  std::optional<double> recall_vs_flat;
};

std::vector<BenchRow> bench_search(const MipsIndex& index,
                                   const EmbeddingMatrix& queries,
                                   std::span<const std::size_t> k_values,
                                   const MipsIndex* flat_reference = nullptr);

/// Plain-text table: header line then one row per (variant, k).
std::string format_bench_table(std::span<const BenchRow> rows);

}  // namespace retdistill
