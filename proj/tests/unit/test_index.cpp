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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "index/mips_index.hpp"
#include "index/variants.hpp"
#include "test_util.hpp"

namespace retdistill {
namespace {

using testing::brute_force;
using testing::error_kind_of;
using testing::gaussian_matrix;
using testing::TempDir;
using detail::GraphIndex;
using detail::Sq8Index;

constexpr int kInvalid = static_cast<int>(ErrorKind::kInvalidInput);
constexpr int kFormat = static_cast<int>(ErrorKind::kFormat);

const IndexKind kAllKinds[] = {IndexKind::kFlatIP, IndexKind::kGraphIP, IndexKind::kSq8Flat};

GraphParams small_graph_params() {
  GraphParams p;
  p.neighbors_per_node = 16;
  p.construction_depth = 64;
  p.search_depth = 64;
  return p;
}

std::vector<double> row_copy(const EmbeddingMatrix& m, std::size_t i) {
  const auto r = m.row(i);
  return {r.begin(), r.end()};
}

TEST(MaxNorm, VectorAtMaxNormGetsZero) {
  const auto a = max_norm_augment(std::vector<double>{3.0, 4.0}, 5.0);
  EXPECT_EQ(a, (std::vector<double>{3.0, 4.0, 0.0}));
}

TEST(MaxNorm, ZeroVectorGetsMaxNorm) {
  const auto a = max_norm_augment(std::vector<double>{0.0, 0.0, 0.0}, 2.5);
  EXPECT_EQ(a.back(), 2.5);
}

TEST(MaxNorm, AugmentedL2RankingEqualsInnerProductRanking) {
  const auto data = gaussian_matrix(100, 8, 1);
  double m = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) m = std::max(m, std::sqrt(squared_norm(data.row(i))));
  const auto queries = gaussian_matrix(20, 8, 2);
  for (std::size_t qi = 0; qi < queries.rows(); ++qi) {
    auto q = row_copy(queries, qi);
    const auto ip_order = brute_force(data, q);
    q.push_back(0.0);
    std::vector<std::pair<double, std::int64_t>> l2;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const auto x = max_norm_augment(data.row(i), m);
      double d = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) d += (q[j] - x[j]) * (q[j] - x[j]);
      l2.emplace_back(d, static_cast<std::int64_t>(i));
    }
    std::sort(l2.begin(), l2.end());
    ASSERT_EQ(l2.front().second, ip_order.front().second);
    for (std::size_t i = 0; i < l2.size(); ++i) EXPECT_EQ(l2[i].second, ip_order[i].second);
  }
}

TEST(Sq8, ZeroOneDimensionRoundtripsExactly) {
  EmbeddingMatrix m(2, 1, {0.0, 1.0});
  const auto sq = ScalarQuantizer::train(m);
  EXPECT_EQ(sq.encode(0, 0.0), 0);
  EXPECT_EQ(sq.encode(0, 1.0), 255);
  EXPECT_EQ(sq.decode(0, 0), 0.0);
  EXPECT_EQ(sq.decode(0, 255), 1.0);
}

TEST(Sq8, ConstantDimensionReconstructsConstant) {
  EmbeddingMatrix m(3, 2, {0.7, 1.0, 0.7, 2.0, 0.7, 3.0});
  const auto sq = ScalarQuantizer::train(m);
  for (double v : {0.7}) {
    EXPECT_EQ(sq.encode(0, v), 0);
    EXPECT_EQ(sq.decode(0, sq.encode(0, v)), 0.7);
  }
}

TEST(Sq8, RoundtripErrorWithinHalfStep) {
  const auto data = gaussian_matrix(500, 16, 3);
  const auto sq = ScalarQuantizer::train(data);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto back = sq.decode(sq.encode(data.row(i)));
    for (std::size_t d = 0; d < 16; ++d) {
      const double bound = (sq.maxs()[d] - sq.mins()[d]) / 510.0 + 1e-12;
      EXPECT_LE(std::abs(back[d] - data.row(i)[d]), bound);
    }
  }
}

TEST(Sq8, ScoreErrorWithinL1Bound) {
  const auto data = gaussian_matrix(300, 16, 4);
  const auto index = build_sq8(data);
  const auto& sq = dynamic_cast<const Sq8Index&>(*index).quantizer();
  double max_half_step = 0.0;
  for (std::size_t d = 0; d < 16; ++d) {
    max_half_step = std::max(max_half_step, (sq.maxs()[d] - sq.mins()[d]) / 510.0);
  }
  const auto queries = gaussian_matrix(10, 16, 5);
  for (std::size_t qi = 0; qi < queries.rows(); ++qi) {
    const auto q = row_copy(queries, qi);
    double l1 = 0.0;
    for (double v : q) l1 += std::abs(v);
    const auto r = index->search(q, data.rows());
    for (std::size_t i = 0; i < r.ids.size(); ++i) {
      const double exact = dot(q, data.row(static_cast<std::size_t>(r.ids[i])));
      EXPECT_LE(std::abs(r.scores[i] - exact), l1 * max_half_step + 1e-9);
    }
  }
}

TEST(Sq8, SearchIsExactOverReconstructedVectors) {
  const auto data = gaussian_matrix(200, 8, 6);
  const auto index = build_sq8(data);
  const auto& sq = dynamic_cast<const Sq8Index&>(*index).quantizer();
  EmbeddingMatrix recon(data.rows(), data.dim());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto back = sq.decode(sq.encode(data.row(i)));
    std::copy(back.begin(), back.end(), recon.row(i).begin());
  }
  const auto q = row_copy(gaussian_matrix(1, 8, 7), 0);
  const auto expect = brute_force(recon, q);
  const auto got = index->search(q, 10);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(got.ids[i], expect[i].second);
    EXPECT_NEAR(got.scores[i], expect[i].first, 1e-12);
  }
}

TEST(Search, OrthonormalBasisQueryFindsItsVector) {
  EmbeddingMatrix basis(4, 4);
  for (std::size_t i = 0; i < 4; ++i) basis.row(i)[i] = 1.0;
  const std::vector<double> q{0.0, 0.0, 1.0, 0.0};
  for (auto kind : kAllKinds) {
    const auto index = build_index(kind, basis, small_graph_params());
    const auto r = index->search(q, 1);
    ASSERT_EQ(r.ids.size(), 1u) << index_kind_name(kind);
    EXPECT_EQ(r.ids[0], 2) << index_kind_name(kind);
    EXPECT_EQ(r.scores[0], 1.0) << index_kind_name(kind);
  }
}

TEST(Search, FullKReturnsEveryIdOnceInScoreOrder) {
  const auto data = gaussian_matrix(150, 12, 8);
  const auto q = row_copy(gaussian_matrix(1, 12, 9), 0);
  for (auto kind : kAllKinds) {
    const auto index = build_index(kind, data, small_graph_params());
    for (std::size_t k : {data.rows(), data.rows() + 10}) {
      const auto r = index->search(q, k);
      ASSERT_EQ(r.ids.size(), data.rows()) << index_kind_name(kind);
      ASSERT_EQ(r.scores.size(), data.rows());
      EXPECT_EQ(std::set<std::int64_t>(r.ids.begin(), r.ids.end()).size(), data.rows());
      EXPECT_TRUE(std::is_sorted(r.scores.begin(), r.scores.end(), std::greater<>()));
    }
  }
}

TEST(Search, FlatMatchesBruteForceExactly) {
  const auto data = gaussian_matrix(1000, 64, 10);
  const auto index = build_flat(data);
  const auto queries = gaussian_matrix(25, 64, 11);
  for (std::size_t qi = 0; qi < queries.rows(); ++qi) {
    const auto q = row_copy(queries, qi);
    const auto expect = brute_force(data, q);
    for (std::size_t k : {1u, 10u, 100u}) {
      const auto r = index->search(q, k);
      ASSERT_EQ(r.ids.size(), k);
      for (std::size_t i = 0; i < k; ++i) {
        EXPECT_EQ(r.ids[i], expect[i].second);
        EXPECT_EQ(r.scores[i], expect[i].first);
      }
    }
  }
}

TEST(Search, FlatBreaksTiesBySmallerId) {
  EmbeddingMatrix data(5, 2, {1, 0, 0, 1, 1, 0, 1, 0, 0, 1});
  const auto r = build_flat(data)->search(std::vector<double>{1.0, 0.0}, 4);
  EXPECT_EQ(r.ids, (std::vector<std::int64_t>{0, 2, 3, 1}));
}

TEST(Search, GraphFindsNearlyAllFlatNeighbours) {
  const auto data = gaussian_matrix(2000, 16, 12);
  const auto flat = build_flat(data);
  GraphParams params;
  params.neighbors_per_node = 32;
  params.construction_depth = 128;
  params.search_depth = 128;
  const auto graph = build_graph(data, params);
  const auto queries = gaussian_matrix(50, 16, 13);
  std::size_t hit = 0;
  for (std::size_t qi = 0; qi < queries.rows(); ++qi) {
    const auto q = row_copy(queries, qi);
    const auto a = flat->search(q, 10);
    const auto b = graph->search(q, 10);
    for (auto id : b.ids) hit += std::count(a.ids.begin(), a.ids.end(), id);
    for (std::size_t i = 0; i < b.ids.size(); ++i) {
      EXPECT_EQ(b.scores[i], dot(q, data.row(static_cast<std::size_t>(b.ids[i]))));
    }
  }
  EXPECT_GE(static_cast<double>(hit) / 500.0, 0.95);
}

TEST(Search, WrongQueryDimensionIsInvalidInput) {
  const auto data = gaussian_matrix(10, 4, 14);
  for (auto kind : kAllKinds) {
    const auto index = build_index(kind, data, small_graph_params());
    EXPECT_EQ(error_kind_of([&] { index->search(std::vector<double>(3, 1.0), 1); }), kInvalid);
    EXPECT_EQ(error_kind_of([&] { index->search(std::vector<double>(5, 1.0), 1); }), kInvalid);
  }
}

TEST(Search, EmptyBuildIsInvalidInput) {
  EmbeddingMatrix empty(0, 4);
  for (auto kind : kAllKinds) {
    EXPECT_EQ(error_kind_of([&] { build_index(kind, empty); }), kInvalid);
  }
}

TEST(Search, NonFiniteEmbeddingIsInvalidInput) {
  auto data = gaussian_matrix(5, 3, 15);
  data.row(2)[1] = std::numeric_limits<double>::quiet_NaN();
  for (auto kind : kAllKinds) {
    EXPECT_EQ(error_kind_of([&] { build_index(kind, data); }), kInvalid);
  }
}

TEST(Search, ResultsAreNestedInK) {
  const auto data = gaussian_matrix(300, 8, 16);
  const auto q = row_copy(gaussian_matrix(1, 8, 17), 0);
  for (auto kind : {IndexKind::kFlatIP, IndexKind::kSq8Flat}) {
    const auto index = build_index(kind, data);
    for (std::size_t k = 1; k < 40; ++k) {
      const auto a = index->search(q, k);
      const auto b = index->search(q, k + 1);
      for (auto id : a.ids) {
        EXPECT_NE(std::find(b.ids.begin(), b.ids.end(), id), b.ids.end());
      }
    }
  }
}

TEST(Graph, DefaultsFollowStatedParameters) {
  const GraphParams p;
  EXPECT_EQ(p.neighbors_per_node, 512u);
  EXPECT_EQ(p.construction_depth, 200u);
  EXPECT_EQ(p.search_depth, 128u);
  GraphParams bad;
  bad.search_depth = 0;
  EXPECT_NE(error_kind_of([&] { bad.validate(); }), 0);
}

TEST(Graph, AddRespectsFrozenMaxNorm) {
  const auto data = gaussian_matrix(50, 4, 18);
  auto index = build_graph(data, small_graph_params());
  auto& g = dynamic_cast<GraphIndex&>(*index);
  const double m = g.max_norm();
  std::vector<double> inside{m / 2.0, 0.0, 0.0, 0.0};
  g.add(inside);
  EXPECT_EQ(g.size(), 51u);
  const auto r = g.search(std::vector<double>{1.0, 0.0, 0.0, 0.0}, 51);
  EXPECT_NE(std::find(r.ids.begin(), r.ids.end(), 50), r.ids.end());
  std::vector<double> outside{m * 1.01, 0.0, 0.0, 0.0};
  EXPECT_EQ(error_kind_of([&] { g.add(outside); }), kInvalid);
  EXPECT_EQ(g.size(), 51u);
}

TEST(Graph, DegreeNeverExceedsLimit) {
  const auto data = gaussian_matrix(600, 8, 19);
  auto params = small_graph_params();
  params.neighbors_per_node = 6;
  const auto index = build_graph(data, params);
  const auto& g = dynamic_cast<const GraphIndex&>(*index);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LE(g.degree(i), 6u);
}

TEST(Serialization, RoundtripIsBitIdenticalForEveryKind) {
  TempDir dir;
  const auto data = gaussian_matrix(400, 10, 20);
  const auto queries = gaussian_matrix(20, 10, 21);
  for (auto kind : kAllKinds) {
    const auto index = build_index(kind, data, small_graph_params());
    const auto path = dir / ("i" + index_kind_name(kind) + ".rdrx");
    serialize_index(*index, path);
    const auto back = deserialize_index(path);
    EXPECT_EQ(back->kind(), kind);
    EXPECT_EQ(back->size(), 400u);
    EXPECT_EQ(back->dim(), 10u);
    for (std::size_t qi = 0; qi < queries.rows(); ++qi) {
      const auto q = row_copy(queries, qi);
      const auto a = index->search(q, 15);
      const auto b = back->search(q, 15);
      EXPECT_EQ(a.ids, b.ids);
      EXPECT_EQ(a.scores, b.scores);
    }
    std::ostringstream again;
    write_index(*back, again);
    EXPECT_EQ(again.str(), testing::read_file(path));
  }
}

TEST(Serialization, HeaderLayout) {
  const auto data = gaussian_matrix(3, 2, 22);
  std::ostringstream out;
  write_index(*build_flat(data), out);
  const auto s = out.str();
  ASSERT_GE(s.size(), 19u);
  EXPECT_EQ(s.substr(0, 4), "RDRX");
  EXPECT_EQ(static_cast<unsigned char>(s[4]), kIndexFormatVersion);
  EXPECT_EQ(static_cast<unsigned char>(s[5]), 0);
  EXPECT_EQ(static_cast<unsigned char>(s[6]), 0);
  EXPECT_EQ(static_cast<unsigned char>(s[7]), 2);
  EXPECT_EQ(static_cast<unsigned char>(s[11]), 3);
  EXPECT_EQ(s.size(), 19u + 3 * 2 * 8);
}

TEST(Serialization, CorruptFilesAreFormatErrors) {
  const auto data = gaussian_matrix(60, 6, 23);
  for (auto kind : kAllKinds) {
    std::ostringstream out;
    write_index(*build_index(kind, data, small_graph_params()), out);
    const auto bytes = out.str();
    auto load = [](const std::string& b) {
      std::istringstream in(b);
      read_index(in);
    };
    auto magic = bytes;
    magic[1] = 'Z';
    EXPECT_EQ(error_kind_of([&] { load(magic); }), kFormat);
    auto version = bytes;
    version[4] = 7;
    EXPECT_EQ(error_kind_of([&] { load(version); }), kFormat);
    auto variant = bytes;
    variant[6] = 9;
    EXPECT_EQ(error_kind_of([&] { load(variant); }), kFormat);
    for (std::size_t cut : {std::size_t{3}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
      EXPECT_EQ(error_kind_of([&] { load(bytes.substr(0, cut)); }), kFormat)
          << index_kind_name(kind) << " cut " << cut;
    }
  }
}

TEST(Serialization, MissingFileIsIoError) {
  TempDir dir;
  EXPECT_EQ(error_kind_of([&] { deserialize_index(dir / "absent.rdrx"); }),
            static_cast<int>(ErrorKind::kIo));
}

TEST(Bench, ReportsEveryKWithRecall) {
  const auto data = gaussian_matrix(200, 8, 24);
  const auto queries = gaussian_matrix(5, 8, 25);
  const auto flat = build_flat(data);
  const std::vector<std::size_t> ks{1, 5, 10};
  const auto rows = bench_search(*flat, queries, ks, flat.get());
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rows[i].k, ks[i]);
    EXPECT_GE(rows[i].mean_ms, 0.0);
    ASSERT_TRUE(rows[i].recall_vs_flat.has_value());
    EXPECT_EQ(*rows[i].recall_vs_flat, 1.0);
  }
  const auto table = format_bench_table(rows);
  EXPECT_EQ(table.rfind("variant\tk\tmean_ms\trecall_vs_flat\n", 0), 0u);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
  const auto no_ref = bench_search(*flat, queries, ks);
  EXPECT_FALSE(no_ref[0].recall_vs_flat.has_value());
  EXPECT_NE(format_bench_table(no_ref).find("\t-\n"), std::string::npos);
}

TEST(Kinds, NamesRoundtrip) {
  for (auto kind : kAllKinds) EXPECT_EQ(parse_index_kind(index_kind_name(kind)), kind);
  EXPECT_NE(error_kind_of([] { parse_index_kind("ivfpq"); }), 0);
}

}  // namespace
}  // namespace retdistill
