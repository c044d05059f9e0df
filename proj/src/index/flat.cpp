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

#include <algorithm>
#include <cmath>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "index/topk.hpp"
#include "index/variants.hpp"

namespace retdistill {

namespace detail {

SearchResult FlatIndex::search(std::span<const double> query, std::size_t k) const {
  require(query.size() == dim(), "query dimension mismatch");
  require(k >= 1, "k must be >= 1");
  const std::size_t n = size(), d = dim();
  TopK top(std::min(k, n));
  const double* base = data_.data().data();
  std::size_t i = 0;
  // Four rows at a time; each row still accumulates left to right, so every
  // score is bit-identical to dot().
  for (; i + 4 <= n; i += 4) {
    const double* r0 = base + i * d;
    const double* r1 = r0 + d;
    const double* r2 = r1 + d;
    const double* r3 = r2 + d;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double qj = query[j];
      s0 += qj * r0[j];
      s1 += qj * r1[j];
      s2 += qj * r2[j];
      s3 += qj * r3[j];
    }
    top.push(s0, static_cast<std::int64_t>(i));
    top.push(s1, static_cast<std::int64_t>(i + 1));
    top.push(s2, static_cast<std::int64_t>(i + 2));
    top.push(s3, static_cast<std::int64_t>(i + 3));
  }
  for (; i < n; ++i) {
    top.push(dot(query, data_.row(i)), static_cast<std::int64_t>(i));
  }
  return top.take();
}

void FlatIndex::write_payload(std::ostream& out) const {
  for (double v : data_.data()) io::write_f64(out, v);
}

std::unique_ptr<FlatIndex> FlatIndex::read_payload(std::istream& in, std::size_t dim,
                                                   std::size_t count) {
  std::vector<double> data(dim * count);
  for (auto& v : data) v = io::read_f64(in);
  return std::make_unique<FlatIndex>(EmbeddingMatrix(count, dim, std::move(data)));
}

}  // namespace detail

namespace {

void check_embeddings(const EmbeddingMatrix& e) {
  require(e.rows() >= 1, "cannot index an empty embedding set");
  require(e.dim() >= 1, "embedding dimension must be positive");
  require(all_finite(e.data()), "embeddings must be finite");
}

}  // namespace

std::unique_ptr<MipsIndex> build_flat(const EmbeddingMatrix& embeddings) {
  check_embeddings(embeddings);
  return std::make_unique<detail::FlatIndex>(embeddings);
}

std::unique_ptr<MipsIndex> build_sq8(const EmbeddingMatrix& embeddings) {
  check_embeddings(embeddings);
  auto sq = ScalarQuantizer::train(embeddings);
  std::vector<std::uint8_t> codes;
  codes.reserve(embeddings.rows() * embeddings.dim());
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    const auto c = sq.encode(embeddings.row(i));
    codes.insert(codes.end(), c.begin(), c.end());
  }
  return std::make_unique<detail::Sq8Index>(std::move(sq), embeddings.rows(),
                                            std::move(codes));
}

std::unique_ptr<MipsIndex> build_graph(const EmbeddingMatrix& embeddings,
                                       const GraphParams& params) {
  check_embeddings(embeddings);
  params.validate();
  return std::make_unique<detail::GraphIndex>(embeddings, params);
}

std::unique_ptr<MipsIndex> build_index(IndexKind kind, const EmbeddingMatrix& embeddings,
                                       const GraphParams& params) {
  switch (kind) {
    case IndexKind::kFlatIP: return build_flat(embeddings);
    case IndexKind::kGraphIP: return build_graph(embeddings, params);
    case IndexKind::kSq8Flat: return build_sq8(embeddings);
  }
  fail(ErrorKind::kInvalidInput, "unknown index kind");
}

std::string index_kind_name(IndexKind kind) {
  switch (kind) {
    case IndexKind::kFlatIP: return "flat";
    case IndexKind::kGraphIP: return "graph";
    case IndexKind::kSq8Flat: return "sq8";
  }
  return "unknown";
}

IndexKind parse_index_kind(const std::string& name) {
  if (name == "flat") return IndexKind::kFlatIP;
  if (name == "graph") return IndexKind::kGraphIP;
  if (name == "sq8") return IndexKind::kSq8Flat;
  fail(ErrorKind::kInvalidInput, "unknown index type '" + name + "' (flat|graph|sq8)");
}

void GraphParams::validate() const {
  require(neighbors_per_node >= 2 && construction_depth >= 1 && search_depth >= 1,
          "graph parameters must be positive (neighbors_per_node >= 2)");
  require(prune_slack >= 1.0 && std::isfinite(prune_slack), "prune_slack must be >= 1");
}

}  // namespace retdistill
