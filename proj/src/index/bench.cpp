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

#include <chrono>
#include <cstdio>
#include <unordered_set>

#include "common/error.hpp"
#include "index/mips_index.hpp"

namespace retdistill {

std::vector<BenchRow> bench_search(const MipsIndex& index, const EmbeddingMatrix& queries,
                                   std::span<const std::size_t> k_values,
                                   const MipsIndex* flat_reference) {
  require(queries.rows() >= 1, "bench_search needs at least one query");
  require(queries.dim() == index.dim(), "query dimension mismatch");
  std::vector<BenchRow> rows;
  for (std::size_t k : k_values) {
    BenchRow row;
    row.variant = index_kind_name(index.kind());
    row.k = k;
    std::vector<SearchResult> results;
    results.reserve(queries.rows());
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < queries.rows(); ++i) {
      results.push_back(index.search(queries.row(i), k));
    }
    const auto t1 = std::chrono::steady_clock::now();
    row.mean_ms = std::chrono::duration<double, std::milli>(t1 - t0).count() /
                  static_cast<double>(queries.rows());
    if (flat_reference != nullptr) {
      double total = 0.0;
      for (std::size_t i = 0; i < queries.rows(); ++i) {
        const auto ref = flat_reference->search(queries.row(i), k);
        const std::unordered_set<std::int64_t> truth(ref.ids.begin(), ref.ids.end());
        std::size_t hit = 0;
        for (auto id : results[i].ids) hit += truth.count(id);
        total += static_cast<double>(hit) / static_cast<double>(ref.ids.size());
      }
      row.recall_vs_flat = total / static_cast<double>(queries.rows());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_bench_table(std::span<const BenchRow> rows) {
  std::string out = "variant\tk\tmean_ms\trecall_vs_flat\n";
  char buf[128];
  for (const auto& r : rows) {
    if (r.recall_vs_flat) {
      std::snprintf(buf, sizeof buf, "%s\t%zu\t%.6f\t%.6f\n", r.variant.c_str(), r.k,
                    r.mean_ms, *r.recall_vs_flat);
    } else {
      std::snprintf(buf, sizeof buf, "%s\t%zu\t%.6f\t-\n", r.variant.c_str(), r.k, r.mean_ms);
    }
    out += buf;
  }
  return out;
}

}  // namespace retdistill
