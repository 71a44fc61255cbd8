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

// Independent reference implementations used only by tests. They share no
// code with the library kernels: padding is recomputed from first principles
// and schedules are enumerated exhaustively. The plain convolutions sum in
// float in (ky, kx, ci) order with bias last; the *_exact variants sum in
// double.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "btn/blocks.hpp"
#include "btn/compute_graph.hpp"
#include "btn/kernels.hpp"

namespace btn::oracle {

/// Direct six-loop convolution with SAME padding.
Tensor conv2d(const Tensor& input, const Conv2dParams& p);

Tensor depthwise(const Tensor& input, const DepthwiseParams& p);

/// expand -> relu6 -> depthwise -> relu6 -> project (+ input), built from the
/// oracle convolutions above.
Tensor bottleneck(const Tensor& input, const BottleneckParams& p);

Tensor conv2d_exact(const Tensor& input, const Conv2dParams& p);
Tensor depthwise_exact(const Tensor& input, const DepthwiseParams& p);
Tensor bottleneck_exact(const Tensor& input, const BottleneckParams& p);

/// max |got - want| divided by max |want|.
double scaled_diff(const Tensor& got, const Tensor& want);

/// Multiply-adds counted by walking every output element and kernel tap.
std::uint64_t conv2d_madds(const Shape& input, const Conv2dParams& p);
std::uint64_t depthwise_madds(const Shape& input, const DepthwiseParams& p);

/// Peak of one order, recomputed from scratch: tensor lifetimes spanning
/// producer to last reader.
std::uint64_t schedule_peak(const ComputeGraph& g, const std::vector<std::size_t>& order);

struct Enumeration {
  std::uint64_t best_peak = 0;
  std::vector<std::size_t> best_order;  // lexicographically smallest optimum
  std::size_t orders = 0;
};

/// Visits every topological order in lexicographic order.
Enumeration enumerate_schedules(const ComputeGraph& g);

}  // namespace btn::oracle
