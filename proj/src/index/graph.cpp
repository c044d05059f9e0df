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
#include <cstring>
#include <limits>
#include <queue>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "index/topk.hpp"
#include "index/variants.hpp"

namespace retdistill {

std::vector<double> max_norm_augment(std::span<const double> x, double max_norm) {
  std::vector<double> out(x.begin(), x.end());
  const double extra = max_norm * max_norm - squared_norm(x);
  out.push_back(std::sqrt(std::max(0.0, extra)));
  return out;
}

namespace detail {

namespace {

constexpr int kMaxLevel = 16;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

GraphIndex::GraphIndex(EmbeddingMatrix data, const GraphParams& params)
    : data_(std::move(data)), params_(params), rng_state_(params.level_seed) {
  const std::size_t n = data_.rows();
  require(n < std::numeric_limits<std::uint32_t>::max(), "too many vectors for a graph index");
  for (std::size_t i = 0; i < n; ++i) {
    max_norm_ = std::max(max_norm_, std::sqrt(squared_norm(data_.row(i))));
  }
  stride_ = (data_.dim() + 1 + 7) / 8 * 8;
  aug_.assign(n * stride_, 0.0f);
  levels_.reserve(n);
  links_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) prepare_float_row(i);
  for (std::size_t i = 0; i < n; ++i) {
    levels_.push_back(draw_level());
    links_.emplace_back(static_cast<std::size_t>(levels_.back()) + 1);
    link_dists_.emplace_back(static_cast<std::size_t>(levels_.back()) + 1);
    insert(static_cast<std::uint32_t>(i));
  }
}

void GraphIndex::prepare_float_row(std::size_t i) {
  const auto a = max_norm_augment(data_.row(i), max_norm_);
  float* dst = aug_.data() + i * stride_;
  for (std::size_t j = 0; j < a.size(); ++j) dst[j] = static_cast<float>(a[j]);
}

void GraphIndex::prefetch_row(std::uint32_t node) const {
  const char* p = reinterpret_cast<const char*>(float_row(node));
  for (std::size_t off = 0; off < stride_ * sizeof(float); off += 64) __builtin_prefetch(p + off);
  __builtin_prefetch(p + stride_ * sizeof(float) - 1);
}

float GraphIndex::distance(const float* a, std::uint32_t node) const {
  // Rows are padded to a multiple of 8 floats; accumulate 8 lanes at a time.
  using Lanes = float __attribute__((vector_size(32)));
  const float* b = float_row(node);
  Lanes acc{};
  for (std::size_t j = 0; j < stride_; j += 8) {
    Lanes va;
    Lanes vb;
    std::memcpy(&va, a + j, sizeof(Lanes));
    std::memcpy(&vb, b + j, sizeof(Lanes));
    const Lanes diff = va - vb;
    acc += diff * diff;
  }
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

int GraphIndex::draw_level() {
  const double ml = 1.0 / std::log(static_cast<double>(params_.neighbors_per_node));
  // Uniform in (0, 1].
  const double u = (static_cast<double>(splitmix64(rng_state_) >> 11) + 1.0) * 0x1.0p-53;
  return std::min(kMaxLevel, static_cast<int>(-std::log(u) * ml));
}

void GraphIndex::prefetch_links(std::uint32_t node, std::size_t level) const {
  const auto& list = links_[node][level];
  const char* p = reinterpret_cast<const char*>(list.data());
  const std::size_t bytes = list.size() * sizeof(std::uint32_t);
  for (std::size_t off = 0; off < bytes; off += 64) __builtin_prefetch(p + off);
}

std::vector<GraphIndex::Candidate> GraphIndex::search_layer(const float* q,
                                                            std::vector<Candidate> entry,
                                                            std::size_t ef, int level) const {
  // One bit per node keeps the visited set small enough to stay in cache.
  thread_local std::vector<std::uint64_t> visited;
  visited.assign((size() + 63) / 64, 0);
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> frontier;
  std::priority_queue<Candidate> best;
  for (const auto& c : entry) {
    const std::uint64_t bit = std::uint64_t{1} << (c.second & 63);
    if (visited[c.second >> 6] & bit) continue;
    visited[c.second >> 6] |= bit;
    frontier.push(c);
    best.push(c);
    if (best.size() > ef) best.pop();
  }
  const auto lv = static_cast<std::size_t>(level);
  thread_local std::vector<std::uint32_t> pending;
  while (!frontier.empty()) {
    const Candidate c = frontier.top();
    if (best.size() >= ef && c > best.top()) break;
    frontier.pop();
    // The next node to expand is usually the current frontier top.
    if (!frontier.empty()) prefetch_links(frontier.top().second, lv);
    // Collect unvisited neighbours first so their rows can be fetched ahead
    // of the distance computations. The filter is branch free: about a
    // quarter of the ids are new, so a branch would mispredict often.
    const auto& list = links_[c.second][lv];
    pending.resize(list.size());
    std::size_t fresh = 0;
    for (std::uint32_t nb : list) {
      std::uint64_t& word = visited[nb >> 6];
      const std::uint64_t bit = std::uint64_t{1} << (nb & 63);
      const bool was = (word & bit) != 0;
      word |= bit;
      pending[fresh] = nb;
      fresh += static_cast<std::size_t>(!was);
    }
    pending.resize(fresh);
    for (std::size_t i = 0; i < std::min(kPrefetchAhead, pending.size()); ++i) prefetch_row(pending[i]);
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (i + kPrefetchAhead < pending.size()) prefetch_row(pending[i + kPrefetchAhead]);
      const std::uint32_t nb = pending[i];
      const Candidate cand{distance(q, nb), nb};
      if (best.size() < ef || cand < best.top()) {
        frontier.push(cand);
        best.push(cand);
        if (best.size() > ef) best.pop();
      }
    }
  }
  std::vector<Candidate> out(best.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = best.top();
    best.pop();
  }
  return out;
}

std::vector<GraphIndex::Candidate> GraphIndex::select_neighbors(
    std::vector<Candidate> candidates, std::size_t cap) const {
  std::sort(candidates.begin(), candidates.end());
  // A candidate is dropped when some already selected neighbour is closer to
  // it (by a factor of prune_slack) than the node being linked.
  const auto slack = static_cast<float>(params_.prune_slack);
  std::vector<Candidate> selected;
  for (const auto& cand : candidates) {
    if (selected.size() >= cap) break;
    bool keep = true;
    const float* cv = float_row(cand.second);
    for (const auto& s : selected) {
      if (slack * distance(cv, s.second) < cand.first) {
        keep = false;
        break;
      }
    }
    if (keep) selected.push_back(cand);
  }
  return selected;
}

void GraphIndex::connect(std::uint32_t from, std::uint32_t to, float dist, int level) {
  auto& list = links_[from][static_cast<std::size_t>(level)];
  auto& dists = link_dists_[from][static_cast<std::size_t>(level)];
  if (list.size() < params_.neighbors_per_node) {
    list.push_back(to);
    dists.push_back(dist);
    return;
  }
  // Full list: the new link replaces the farthest current neighbour if it is
  // closer than that neighbour.
  std::size_t worst = 0;
  float worst_d = -1.0f;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const float d = dists[i];
    if (d > worst_d || (d == worst_d && list[i] > list[worst])) {
      worst_d = d;
      worst = i;
    }
  }
  if (dist < worst_d) {
    list[worst] = to;
    dists[worst] = dist;
  }
}

void GraphIndex::insert(std::uint32_t node) {
  const int level = levels_[node];
  if (max_level_ < 0) {
    entry_ = node;
    max_level_ = level;
    return;
  }
  const float* q = float_row(node);
  std::uint32_t cur = entry_;
  float cur_d = distance(q, cur);
  for (int lc = max_level_; lc > level; --lc) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::uint32_t nb : links_[cur][static_cast<std::size_t>(lc)]) {
        const float d = distance(q, nb);
        if (d < cur_d || (d == cur_d && nb < cur)) {
          cur_d = d;
          cur = nb;
          moved = true;
        }
      }
    }
  }
  std::vector<Candidate> eps{{cur_d, cur}};
  for (int lc = std::min(level, max_level_); lc >= 0; --lc) {
    auto found = search_layer(q, eps, params_.construction_depth, lc);
    auto chosen = select_neighbors(found, params_.neighbors_per_node);
    auto& ids = links_[node][static_cast<std::size_t>(lc)];
    auto& dists = link_dists_[node][static_cast<std::size_t>(lc)];
    ids.clear();
    dists.clear();
    for (const auto& [d, nb] : chosen) {
      connect(nb, node, d, lc);
      ids.push_back(nb);
      dists.push_back(d);
    }
    eps = std::move(found);
  }
  if (level > max_level_) {
    entry_ = node;
    max_level_ = level;
  }
}

void GraphIndex::add(std::span<const double> x) {
  require(x.size() == dim(), "embedding dimension mismatch");
  require(all_finite(x), "embeddings must be finite");
  if (std::sqrt(squared_norm(x)) > max_norm_) {
    fail(ErrorKind::kInvalidInput,
         "vector norm exceeds the frozen max norm; rebuild the graph index");
  }
  require(size() + 1 < std::numeric_limits<std::uint32_t>::max(), "graph index is full");
  data_.append_row(x);
  const std::size_t i = data_.rows() - 1;
  aug_.resize(data_.rows() * stride_, 0.0f);
  prepare_float_row(i);
  levels_.push_back(draw_level());
  links_.emplace_back(static_cast<std::size_t>(levels_.back()) + 1);
  link_dists_.emplace_back(static_cast<std::size_t>(levels_.back()) + 1);
  insert(static_cast<std::uint32_t>(i));
}

SearchResult GraphIndex::search(std::span<const double> query, std::size_t k) const {
  require(query.size() == dim(), "query dimension mismatch");
  require(k >= 1, "k must be >= 1");
  const std::size_t n = size();
  if (k >= n) {
    TopK all(n);
    for (std::size_t i = 0; i < n; ++i) all.push(dot(query, data_.row(i)), static_cast<std::int64_t>(i));
    return all.take();
  }
  std::vector<float> q(stride_, 0.0f);
  for (std::size_t j = 0; j < query.size(); ++j) q[j] = static_cast<float>(query[j]);

  std::uint32_t cur = entry_;
  float cur_d = distance(q.data(), cur);
  for (int lc = max_level_; lc > 0; --lc) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::uint32_t nb : links_[cur][static_cast<std::size_t>(lc)]) {
        const float d = distance(q.data(), nb);
        if (d < cur_d || (d == cur_d && nb < cur)) {
          cur_d = d;
          cur = nb;
          moved = true;
        }
      }
    }
  }
  const auto found = search_layer(q.data(), {{cur_d, cur}},
                                  std::max(params_.search_depth, k), 0);
  TopK top(k);
  for (const auto& c : found) {
    top.push(dot(query, data_.row(c.second)), static_cast<std::int64_t>(c.second));
  }
  return top.take();
}

void GraphIndex::write_payload(std::ostream& out) const {
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params_.neighbors_per_node));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params_.construction_depth));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(params_.search_depth));
  io::write_le<std::uint64_t>(out, params_.level_seed);
  io::write_f64(out, params_.prune_slack);
  io::write_le<std::uint64_t>(out, rng_state_);
  io::write_f64(out, max_norm_);
  io::write_le<std::uint32_t>(out, entry_);
  io::write_le<std::int32_t>(out, max_level_);
  for (double v : data_.data()) io::write_f64(out, v);
  for (int l : levels_) io::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(l));
  for (const auto& per_level : links_) {
    for (const auto& list : per_level) {
      io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(list.size()));
      for (auto id : list) io::write_le<std::uint32_t>(out, id);
    }
  }
}

std::unique_ptr<GraphIndex> GraphIndex::read_payload(std::istream& in, std::size_t dim,
                                                     std::size_t count) {
  std::unique_ptr<GraphIndex> g(new GraphIndex());
  g->params_.neighbors_per_node = io::read_le<std::uint32_t>(in);
  g->params_.construction_depth = io::read_le<std::uint32_t>(in);
  g->params_.search_depth = io::read_le<std::uint32_t>(in);
  g->params_.level_seed = io::read_le<std::uint64_t>(in);
  g->params_.prune_slack = io::read_f64(in);
  try {
    g->params_.validate();
  } catch (const Error& e) {
    fail(ErrorKind::kFormat, e.what());
  }
  g->rng_state_ = io::read_le<std::uint64_t>(in);
  g->max_norm_ = io::read_f64(in);
  g->entry_ = io::read_le<std::uint32_t>(in);
  g->max_level_ = io::read_le<std::int32_t>(in);
  if (count >= std::numeric_limits<std::uint32_t>::max() || g->entry_ >= count ||
      g->max_level_ < 0 || g->max_level_ > kMaxLevel || !std::isfinite(g->max_norm_)) {
    fail(ErrorKind::kFormat, "corrupt graph header");
  }
  std::vector<double> data(count * dim);
  for (auto& v : data) v = io::read_f64(in);
  g->data_ = EmbeddingMatrix(count, dim, std::move(data));
  g->levels_.resize(count);
  for (auto& l : g->levels_) {
    l = io::read_le<std::uint8_t>(in);
    if (l > g->max_level_) fail(ErrorKind::kFormat, "node level above graph max level");
  }
  g->links_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    g->links_[i].resize(static_cast<std::size_t>(g->levels_[i]) + 1);
    for (std::size_t lv = 0; lv < g->links_[i].size(); ++lv) {
      auto& list = g->links_[i][lv];
      const auto n = io::read_le<std::uint32_t>(in);
      if (n > g->params_.neighbors_per_node) fail(ErrorKind::kFormat, "neighbour list too long");
      list.resize(n);
      for (auto& id : list) {
        id = io::read_le<std::uint32_t>(in);
        if (id >= count || static_cast<std::size_t>(g->levels_[id]) < lv) {
          fail(ErrorKind::kFormat, "neighbour id out of range");
        }
      }
    }
  }
  if (g->levels_[g->entry_] != g->max_level_) fail(ErrorKind::kFormat, "corrupt entry point");
  g->stride_ = (dim + 1 + 7) / 8 * 8;
  g->aug_.assign(count * g->stride_, 0.0f);
  for (std::size_t i = 0; i < count; ++i) g->prepare_float_row(i);
  g->link_dists_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float* row = g->float_row(static_cast<std::uint32_t>(i));
    g->link_dists_[i].resize(g->links_[i].size());
    for (std::size_t lv = 0; lv < g->links_[i].size(); ++lv) {
      for (auto id : g->links_[i][lv]) g->link_dists_[i][lv].push_back(g->distance(row, id));
    }
  }
  return g;
}

}  // namespace detail
}  // namespace retdistill
