// Copyright 2026 The btn Authors. All rights reserved.
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
#include <string>
#include <vector>

#include "btn/architecture.hpp"

namespace btn {

// One multiply-accumulate is one MAdd; bias additions, pooling and residual
// adds are free. Spatial costs are charged at the SAME-padded output
// resolution ceil(h/s) x ceil(w/s).

std::uint64_t madds_standard_conv(std::size_t h, std::size_t w, std::size_t in_channels,
                                  std::size_t out_channels, std::size_t kernel, std::size_t stride);

std::uint64_t madds_depthwise(std::size_t h, std::size_t w, std::size_t channels,
                              std::size_t kernel, std::size_t stride);

/// Depthwise k x k followed by a 1x1 pointwise conv: d_i * (k^2 + d_j) per
/// output pixel.
std::uint64_t madds_depthwise_separable(std::size_t h, std::size_t w, std::size_t in_channels,
                                        std::size_t out_channels, std::size_t kernel,
                                        std::size_t stride);

struct CostRow {
  std::string name;
  LayerKind kind = LayerKind::kStem;
  std::size_t out_height = 0, out_width = 0, out_channels = 0;
  std::uint64_t madds = 0;
  /// Inference parameters: weights plus one folded bias per output channel.
  std::uint64_t params = 0;
  /// Batch-norm scale/offset pairs the layer carries during training.
  std::uint64_t bn_params = 0;
};

struct CostReport {
  double width_multiplier = 1.0;
  std::size_t input_resolution = 224;
  std::vector<CostRow> rows;
  std::uint64_t total_madds = 0;
  std::uint64_t total_params = 0;
  std::uint64_t total_bn_params = 0;
  std::uint64_t classifier_madds = 0;
  std::uint64_t classifier_params = 0;

  /// Convention where each batch-normalized channel counts scale and offset
  /// instead of a single folded bias.
  std::uint64_t params_with_batchnorm() const;
};

CostReport model_cost(const ModelSpec& spec);

/// Runs one batch-1 forward pass with counting kernels and returns the
/// multiply-adds they executed.
std::uint64_t instrumented_count(const Model& model, const Tensor& input,
                                 std::size_t split = 1);

}  // namespace btn
