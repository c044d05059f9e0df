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
#include <random>
#include <span>
#include <vector>

namespace retdistill {

/// Stack of affine layers with tanh between them and a linear output layer.
/// All parameters live in one contiguous buffer: for each layer the
/// out x in row-major weight block followed by the bias.
class Mlp {
 public:
  /// Activations recorded by a forward pass, consumed by backward().
  struct Trace {
    std::vector<std::vector<double>> activations;
  };

  Mlp() = default;
  /// widths = {input, hidden..., output}; uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) init.
  Mlp(std::vector<std::size_t> widths, std::mt19937_64& rng);
  static Mlp zeros(std::vector<std::size_t> widths);
  static Mlp from_params(std::vector<std::size_t> widths, std::vector<double> params);

  std::size_t input_dim() const { return widths_.front(); }
  std::size_t output_dim() const { return widths_.back(); }
  std::size_t num_layers() const { return widths_.size() - 1; }
  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t num_params() const { return params_.size(); }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  std::vector<double> forward(std::span<const double> x) const;
  std::vector<double> forward(std::span<const double> x, Trace& trace) const;

  /// Accumulates dL/dparams into grad (same layout as params()) given dL/doutput.
  void backward(const Trace& trace, std::span<const double> grad_out,
                std::span<double> grad) const;

  bool operator==(const Mlp&) const = default;

 private:
  static std::size_t count_params(const std::vector<std::size_t>& widths);

  std::vector<std::size_t> widths_;
  std::vector<double> params_;
};

}  // namespace retdistill
