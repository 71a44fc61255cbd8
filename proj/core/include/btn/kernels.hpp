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
#include <vector>

#include "btn/parallel.hpp"
#include "btn/tensor.hpp"

namespace btn {

// All spatial operators use SAME padding: the output extent is ceil(in / s)
// and when the total padding is odd the extra row/column goes to the
// bottom/right. Convolutions are cross-correlations (no kernel flip).

struct SamePadding {
  std::size_t before = 0;
  std::size_t after = 0;
};

std::size_t same_output_extent(std::size_t in, std::size_t stride);
SamePadding same_padding(std::size_t in, std::size_t kernel, std::size_t stride);

/// Dense k x k convolution. Weights are laid out (ky, kx, in, out); bias holds
/// one value per output channel or is empty for a bias-free convolution.
struct Conv2dParams {
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::vector<float> weights;
  std::vector<float> bias;

  static Conv2dParams zeros(std::size_t kernel, std::size_t stride,
                            std::size_t in_channels, std::size_t out_channels);

  std::size_t weight_index(std::size_t ky, std::size_t kx, std::size_t ci,
                           std::size_t co) const noexcept {
    return ((ky * kernel + kx) * in_channels + ci) * out_channels + co;
  }
  void validate() const;

  /// Keeps output channels [begin, end): columns of the weight matrix.
  Conv2dParams slice_outputs(std::size_t begin, std::size_t end) const;
  /// Keeps input channels [begin, end): rows of the weight matrix. The bias is
  /// dropped, since a partial sum over inputs must not add it.
  Conv2dParams slice_inputs(std::size_t begin, std::size_t end) const;
};

/// One k x k filter per channel, weights laid out (ky, kx, channel).
struct DepthwiseParams {
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t channels = 0;
  std::vector<float> weights;
  std::vector<float> bias;

  static DepthwiseParams zeros(std::size_t kernel, std::size_t stride, std::size_t channels);

  std::size_t weight_index(std::size_t ky, std::size_t kx, std::size_t c) const noexcept {
    return (ky * kernel + kx) * channels + c;
  }
  void validate() const;
  DepthwiseParams slice_channels(std::size_t begin, std::size_t end) const;
};

Shape conv2d_output_shape(const Shape& input, const Conv2dParams& p);

Tensor conv2d(const Tensor& input, const Conv2dParams& p, const ExecContext& ctx = {});

/// out += conv(input) without bias. Each output element continues summing from
/// its current value in (ky, kx, ci) order, so splitting the input channels
/// into consecutive slices and accumulating them in order reproduces conv2d's
/// arithmetic exactly.
void conv2d_accumulate(const Tensor& input, const Conv2dParams& p, Tensor& out,
                       const ExecContext& ctx = {});

Tensor depthwise_conv(const Tensor& input, const DepthwiseParams& p,
                      const ExecContext& ctx = {});

Tensor relu6(const Tensor& input);
Tensor relu(const Tensor& input);

/// Mean over height and width with a 64-bit accumulator per channel.
Tensor global_avgpool(const Tensor& input);

Tensor add_residual(const Tensor& a, const Tensor& b);

/// Adds bias[c] to every element of channel c.
void add_bias_inplace(Tensor& t, const std::vector<float>& bias);

}  // namespace btn
