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

// Concrete index types. Only the builders and the file reader construct them.

#include <cstdint>
#include <istream>
#include <memory>
#include <vector>

#include "index/mips_index.hpp"

namespace retdistill::detail {

class FlatIndex final : public MipsIndex {
 public:
  explicit FlatIndex(EmbeddingMatrix data) : data_(std::move(data)) {}

  IndexKind kind() const override { return IndexKind::kFlatIP; }
  std::size_t dim() const override { return data_.dim(); }
  std::size_t size() const override { return data_.rows(); }
  SearchResult search(std::span<const double> query, std::size_t k) const override;
  void write_payload(std::ostream& out) const override;

  static std::unique_ptr<FlatIndex> read_payload(std::istream& in, std::size_t dim,
                                                 std::size_t count);

 private:
  EmbeddingMatrix data_;
};

class Sq8Index final : public MipsIndex {
 public:
  Sq8Index(ScalarQuantizer quantizer, std::size_t count, std::vector<std::uint8_t> codes);

  IndexKind kind() const override { return IndexKind::kSq8Flat; }
  std::size_t dim() const override { return quantizer_.dim(); }
  std::size_t size() const override { return count_; }
  SearchResult search(std::span<const double> query, std::size_t k) const override;
  void write_payload(std::ostream& out) const override;

  const ScalarQuantizer& quantizer() const { return quantizer_; }
  const std::vector<std::uint8_t>& codes() const { return codes_; }

  static std::unique_ptr<Sq8Index> read_payload(std::istream& in, std::size_t dim,
                                                std::size_t count);

 private:
  ScalarQuantizer quantizer_;
  std::size_t count_;
  std::vector<std::uint8_t> codes_;
};

/// Layered navigable small-world graph over max-norm augmented vectors under
/// L2. Traversal runs on a float copy; final candidates are re-scored with the
/// exact double inner product.
class GraphIndex final : public MipsIndex {
 public:
  GraphIndex(EmbeddingMatrix data, const GraphParams& params);

  IndexKind kind() const override { return IndexKind::kGraphIP; }
  std::size_t dim() const override { return data_.dim(); }
  std::size_t size() const override { return data_.rows(); }
  SearchResult search(std::span<const double> query, std::size_t k) const override;
  void write_payload(std::ostream& out) const override;

  /// Inserts a vector whose norm does not exceed the frozen max norm.
  void add(std::span<const double> x);

  double max_norm() const { return max_norm_; }
  const GraphParams& params() const { return params_; }
  int max_level() const { return max_level_; }
  std::size_t degree(std::size_t node, int level = 0) const {
    return links_[node][static_cast<std::size_t>(level)].size();
  }

  static std::unique_ptr<GraphIndex> read_payload(std::istream& in, std::size_t dim,
                                                  std::size_t count);

 private:
  using Candidate = std::pair<float, std::uint32_t>;

  GraphIndex() = default;
  void prepare_float_row(std::size_t i);
  void prefetch_row(std::uint32_t node) const;
  void prefetch_links(std::uint32_t node, std::size_t level) const;
  static constexpr std::size_t kPrefetchAhead = 8;
  float distance(const float* a, std::uint32_t node) const;
  const float* float_row(std::uint32_t node) const {
    return aug_.data() + static_cast<std::size_t>(node) * stride_;
  }
  int draw_level();
  void insert(std::uint32_t node);
  std::vector<Candidate> search_layer(const float* q, std::vector<Candidate> entry,
                                      std::size_t ef, int level) const;
  std::vector<Candidate> select_neighbors(std::vector<Candidate> candidates,
                                         std::size_t cap) const;
  void connect(std::uint32_t from, std::uint32_t to, float dist, int level);

  EmbeddingMatrix data_;
  GraphParams params_;
  double max_norm_ = 0.0;
  std::size_t stride_ = 0;
  // Float copy of the augmented rows used for traversal; final scores are
  // recomputed from data_.
  std::vector<float> aug_;
  std::vector<int> levels_;
  // links_[node][level] -> neighbour ids
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;
  // Squared distances matching links_, used when a full list is updated.
  std::vector<std::vector<std::vector<float>>> link_dists_;
  std::uint32_t entry_ = 0;
  int max_level_ = -1;
  std::uint64_t rng_state_ = 0;
};

}  // namespace retdistill::detail
