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

#include "btn/blocks.hpp"

#include <cmath>
#include <string>

#include "btn/error.hpp"

namespace btn {

std::size_t expanded_width(std::size_t in_channels, double expansion) {
  if (!(expansion >= 1.0)) {
    throw Error(Errc::kInvalidArgument, "expansion ratio must be >= 1");
  }
  return static_cast<std::size_t>(std::lround(expansion * static_cast<double>(in_channels)));
}

BottleneckParams make_bottleneck(const BottleneckConfig& config) {
  if (config.in_channels == 0 || config.out_channels == 0) {
    throw Error(Errc::kInvalidArgument, "bottleneck: channel counts must be positive");
  }
  if (config.stride != 1 && config.stride != 2) {
    throw Error(Errc::kInvalidArgument, "bottleneck: stride must be 1 or 2");
  }
  const bool shape_preserving =
      config.stride == 1 && config.in_channels == config.out_channels;
  if (config.shortcut.has_value() && *config.shortcut != shape_preserving) {
    throw Error(Errc::kInvalidArgument,
                *config.shortcut
                    ? "bottleneck: a shortcut requires stride 1 and in == out channels"
                    : "bottleneck: stride-1 blocks with in == out always carry a shortcut");
  }

  BottleneckParams p;
  p.in_channels = config.in_channels;
  p.out_channels = config.out_channels;
  p.expansion = config.expansion;
  p.stride = config.stride;
  p.expanded_channels = expanded_width(config.in_channels, config.expansion);
  p.residual = shape_preserving;
  if (!(config.fuse_t1_expand && p.expanded_channels == p.in_channels)) {
    p.expand = Conv2dParams::zeros(1, 1, p.in_channels, p.expanded_channels);
  }
  p.depthwise = DepthwiseParams::zeros(3, config.stride, p.expanded_channels);
  p.project = Conv2dParams::zeros(1, 1, p.expanded_channels, p.out_channels);
  return p;
}

void BottleneckParams::validate() const {
  if (expand) {
    expand->validate();
    if (expand->kernel != 1 || expand->stride != 1 || expand->in_channels != in_channels ||
        expand->out_channels != expanded_channels) {
      throw Error(Errc::kInvalidArgument, "bottleneck: expansion stage disagrees with widths");
    }
  } else if (expanded_channels != in_channels) {
    throw Error(Errc::kInvalidArgument,
                "bottleneck: expansion may only be omitted when it keeps the width");
  }
  depthwise.validate();
  if (depthwise.channels != expanded_channels || depthwise.stride != stride ||
      depthwise.kernel != 3) {
    throw Error(Errc::kInvalidArgument, "bottleneck: depthwise stage disagrees with widths");
  }
  project.validate();
  if (project.kernel != 1 || project.stride != 1 ||
      project.in_channels != expanded_channels || project.out_channels != out_channels) {
    throw Error(Errc::kInvalidArgument, "bottleneck: projection stage disagrees with widths");
  }
  if (residual != (stride == 1 && in_channels == out_channels)) {
    throw Error(Errc::kInvalidArgument,
                "bottleneck: shortcut present iff stride 1 and in == out channels");
  }
}

Tensor bottleneck_forward(const Tensor& input, const BottleneckParams& p,
                          const ExecContext& ctx, const ActivationObserver& observer) {
  p.validate();
  if (input.shape().channels != p.in_channels) {
    throw Error(Errc::kChannelMismatch,
                "bottleneck: input has " + std::to_string(input.shape().channels) +
                    " channels, block expects " + std::to_string(p.in_channels));
  }
  std::optional<Tensor> expanded;
  if (p.expand) {
    expanded = relu6(conv2d(input, *p.expand, ctx));
    if (observer) observer("expand", *expanded);
  }
  const Tensor filtered = relu6(depthwise_conv(expanded ? *expanded : input, p.depthwise, ctx));
  if (observer) observer("depthwise", filtered);
  Tensor out = conv2d(filtered, p.project, ctx);
  if (p.residual) out = add_residual(out, input);
  return out;
}

std::uint64_t bottleneck_madds(const BottleneckGeometry& g) {
  const std::uint64_t n = expanded_width(g.in_channels, g.expansion);
  const std::uint64_t in_pixels = std::uint64_t{g.height} * g.width;
  const std::uint64_t out_pixels = std::uint64_t{same_output_extent(g.height, g.stride)} *
                                   same_output_extent(g.width, g.stride);
  const std::uint64_t expand = g.expand_conv ? in_pixels * g.in_channels * n : 0;
  const std::uint64_t depthwise = out_pixels * n * g.kernel * g.kernel;
  const std::uint64_t project = out_pixels * n * g.out_channels;
  return expand + depthwise + project;
}

}  // namespace btn
