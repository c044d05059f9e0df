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

ScalarQuantizer::ScalarQuantizer(std::vector<double> mins, std::vector<double> maxs)
    : mins_(std::move(mins)), maxs_(std::move(maxs)) {
  require(mins_.size() == maxs_.size() && !mins_.empty(), "quantizer range size mismatch");
  steps_.resize(mins_.size());
  for (std::size_t d = 0; d < mins_.size(); ++d) {
    require(maxs_[d] >= mins_[d], "quantizer max below min");
    steps_[d] = (maxs_[d] - mins_[d]) / 255.0;
  }
}

ScalarQuantizer ScalarQuantizer::train(const EmbeddingMatrix& data) {
  std::vector<double> mins(data.row(0).begin(), data.row(0).end());
  std::vector<double> maxs = mins;
  for (std::size_t i = 1; i < data.rows(); ++i) {
    const auto r = data.row(i);
    for (std::size_t d = 0; d < data.dim(); ++d) {
      mins[d] = std::min(mins[d], r[d]);
      maxs[d] = std::max(maxs[d], r[d]);
    }
  }
  return ScalarQuantizer(std::move(mins), std::move(maxs));
}

std::uint8_t ScalarQuantizer::encode(std::size_t d, double v) const {
  const double range = maxs_[d] - mins_[d];
  if (!(range > 0.0)) return 0;
  const double c = std::round(255.0 * (v - mins_[d]) / range);
  return static_cast<std::uint8_t>(std::clamp(c, 0.0, 255.0));
}

std::vector<std::uint8_t> ScalarQuantizer::encode(std::span<const double> v) const {
  require(v.size() == dim(), "quantizer dimension mismatch");
  std::vector<std::uint8_t> out(v.size());
  for (std::size_t d = 0; d < v.size(); ++d) out[d] = encode(d, v[d]);
  return out;
}

std::vector<double> ScalarQuantizer::decode(std::span<const std::uint8_t> codes) const {
  require(codes.size() == dim(), "quantizer dimension mismatch");
  std::vector<double> out(codes.size());
  for (std::size_t d = 0; d < codes.size(); ++d) out[d] = decode(d, codes[d]);
  return out;
}

namespace detail {

Sq8Index::Sq8Index(ScalarQuantizer quantizer, std::size_t count,
                   std::vector<std::uint8_t> codes)
    : quantizer_(std::move(quantizer)), count_(count), codes_(std::move(codes)) {
  require(codes_.size() == count_ * quantizer_.dim(), "code buffer size mismatch");
}

SearchResult Sq8Index::search(std::span<const double> query, std::size_t k) const {
  require(query.size() == dim(), "query dimension mismatch");
  require(k >= 1, "k must be >= 1");
  const std::size_t d = dim();
  const auto& mins = quantizer_.mins();
  std::vector<double> steps(d);
  for (std::size_t j = 0; j < d; ++j) steps[j] = quantizer_.step(j);
  TopK top(std::min(k, count_));
  std::size_t i = 0;
  // Scores are dot(query, decode(codes)) accumulated left to right.
  for (; i + 4 <= count_; i += 4) {
    const std::uint8_t* c0 = codes_.data() + i * d;
    const std::uint8_t* c1 = c0 + d;
    const std::uint8_t* c2 = c1 + d;
    const std::uint8_t* c3 = c2 + d;
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double qj = query[j], mj = mins[j], sj = steps[j];
      s0 += qj * (mj + static_cast<double>(c0[j]) * sj);
      s1 += qj * (mj + static_cast<double>(c1[j]) * sj);
      s2 += qj * (mj + static_cast<double>(c2[j]) * sj);
      s3 += qj * (mj + static_cast<double>(c3[j]) * sj);
    }
    top.push(s0, static_cast<std::int64_t>(i));
    top.push(s1, static_cast<std::int64_t>(i + 1));
    top.push(s2, static_cast<std::int64_t>(i + 2));
    top.push(s3, static_cast<std::int64_t>(i + 3));
  }
  for (; i < count_; ++i) {
    const std::uint8_t* c = codes_.data() + i * d;
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      s += query[j] * (mins[j] + static_cast<double>(c[j]) * steps[j]);
    }
    top.push(s, static_cast<std::int64_t>(i));
  }
  return top.take();
}

void Sq8Index::write_payload(std::ostream& out) const {
  for (double v : quantizer_.mins()) io::write_f64(out, v);
  for (double v : quantizer_.maxs()) io::write_f64(out, v);
  out.write(reinterpret_cast<const char*>(codes_.data()),
            static_cast<std::streamsize>(codes_.size()));
}

std::unique_ptr<Sq8Index> Sq8Index::read_payload(std::istream& in, std::size_t dim,
                                                 std::size_t count) {
  std::vector<double> mins(dim), maxs(dim);
  for (auto& v : mins) v = io::read_f64(in);
  for (auto& v : maxs) v = io::read_f64(in);
  for (std::size_t d = 0; d < dim; ++d) {
    if (!(maxs[d] >= mins[d])) fail(ErrorKind::kFormat, "corrupt quantizer range");
  }
  std::vector<std::uint8_t> codes(dim * count);
  in.read(reinterpret_cast<char*>(codes.data()), static_cast<std::streamsize>(codes.size()));
  if (in.gcount() != static_cast<std::streamsize>(codes.size())) {
    fail(ErrorKind::kFormat, "unexpected end of file");
  }
  return std::make_unique<Sq8Index>(ScalarQuantizer(std::move(mins), std::move(maxs)),
                                    count, std::move(codes));
}

}  // namespace detail
}  // namespace retdistill
