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

#include "encoder/mlp.hpp"

#include <cmath>

#include "common/error.hpp"

namespace retdistill {

std::size_t Mlp::count_params(const std::vector<std::size_t>& widths) {
  require(widths.size() >= 2, "an MLP needs at least input and output widths");
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    require(widths[l] > 0 && widths[l + 1] > 0, "layer widths must be positive");
    n += widths[l + 1] * widths[l] + widths[l + 1];
  }
  return n;
}

Mlp::Mlp(std::vector<std::size_t> widths, std::mt19937_64& rng)
    : widths_(std::move(widths)), params_(count_params(widths_)) {
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    const std::size_t n = widths_[l + 1] * widths_[l] + widths_[l + 1];
    for (std::size_t i = 0; i < n; ++i) params_[off + i] = dist(rng);
    off += n;
  }
}

Mlp Mlp::zeros(std::vector<std::size_t> widths) {
  Mlp m;
  m.params_.assign(count_params(widths), 0.0);
  m.widths_ = std::move(widths);
  return m;
}

Mlp Mlp::from_params(std::vector<std::size_t> widths, std::vector<double> params) {
  Mlp m;
  if (params.size() != count_params(widths)) {
    fail(ErrorKind::kFormat, "parameter count does not match layer shapes");
  }
  m.widths_ = std::move(widths);
  m.params_ = std::move(params);
  return m;
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  Trace scratch;
  return forward(x, scratch);
}

std::vector<double> Mlp::forward(std::span<const double> x, Trace& trace) const {
  require(x.size() == input_dim(), "MLP input dimension mismatch");
  trace.activations.resize(widths_.size());
  trace.activations[0].assign(x.begin(), x.end());
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    const double* w = params_.data() + off;
    const double* b = w + out * in;
    const auto& a = trace.activations[l];
    auto& z = trace.activations[l + 1];
    z.assign(out, 0.0);
    // Inputs are mostly sparse bag-of-words features.
    for (std::size_t o = 0; o < out; ++o) z[o] = b[o];
    for (std::size_t i = 0; i < in; ++i) {
      const double ai = a[i];
      if (ai == 0.0) continue;
      for (std::size_t o = 0; o < out; ++o) z[o] += w[o * in + i] * ai;
    }
    if (l + 2 < widths_.size()) {
      for (auto& v : z) v = std::tanh(v);
    }
    off += out * in + out;
  }
  return trace.activations.back();
}

void Mlp::backward(const Trace& trace, std::span<const double> grad_out,
                   std::span<double> grad) const {
  require(grad.size() == params_.size(), "gradient buffer size mismatch");
  require(grad_out.size() == output_dim(), "output gradient size mismatch");
  std::vector<double> delta(grad_out.begin(), grad_out.end());
  std::size_t off = params_.size();
  for (std::size_t l = widths_.size() - 1; l-- > 0;) {
    const std::size_t in = widths_[l], out = widths_[l + 1];
    off -= out * in + out;
    const double* w = params_.data() + off;
    double* gw = grad.data() + off;
    double* gb = gw + out * in;
    const auto& a = trace.activations[l];
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      if (d == 0.0) continue;
      double* row = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) {
        if (a[i] != 0.0) row[i] += d * a[i];
      }
    }
    if (l == 0) break;
    std::vector<double> prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += row[i] * d;
    }
    for (std::size_t i = 0; i < in; ++i) prev[i] *= 1.0 - a[i] * a[i];
    delta = std::move(prev);
  }
}

}  // namespace retdistill
