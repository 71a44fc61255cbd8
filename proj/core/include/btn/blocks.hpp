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
#include <functional>
#include <optional>
#include <string_view>

#include "btn/kernels.hpp"

namespace btn {

/// Declarative description of one inverted-residual block: k input channels,
/// k' output channels, expansion t, depthwise stride s.
struct BottleneckConfig {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  double expansion = 6.0;
  std::size_t stride = 1;
  /// Omit the 1x1 expansion when t == 1 leaves the width unchanged.
  bool fuse_t1_expand = true;
  /// Optional explicit shortcut request. A value that contradicts
  /// (stride == 1 && in == out) is rejected.
  std::optional<bool> shortcut;
};

std::size_t expanded_width(std::size_t in_channels, double expansion);

/// expand (1x1, ReLU6) -> depthwise 3x3 stride s (ReLU6) -> project (1x1,
/// linear), plus the input when the block keeps shape.
struct BottleneckParams {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t expanded_channels = 0;
  std::size_t stride = 1;
  double expansion = 1.0;
  std::optional<Conv2dParams> expand;
  DepthwiseParams depthwise;
  Conv2dParams project;
  bool residual = false;

  void validate() const;
};

/// Zero-initialized parameters for the given configuration.
BottleneckParams make_bottleneck(const BottleneckConfig& config);

/// Receives every post-ReLU6 activation; stage is "expand" or "depthwise".
using ActivationObserver = std::function<void(std::string_view stage, const Tensor&)>;

Tensor bottleneck_forward(const Tensor& input, const BottleneckParams& p,
                          const ExecContext& ctx = {},
                          const ActivationObserver& observer = {});

struct BottleneckGeometry {
  std::size_t height = 1;
  std::size_t width = 1;
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  double expansion = 6.0;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  bool expand_conv = true;
};

/// Multiply-adds of one block, stage by stage: the expansion runs at the input
/// resolution, depthwise and projection at ceil(h/s) x ceil(w/s). For s = 1
/// this is h*w*k*t*(k + kernel^2 + k').
std::uint64_t bottleneck_madds(const BottleneckGeometry& g);

}  // namespace btn
