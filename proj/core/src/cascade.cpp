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

#include "btn/cascade.hpp"

#include <algorithm>
#include <string>

#include "btn/error.hpp"

namespace btn {

CascadePlan CascadePlan::make(std::size_t channels, std::size_t t) {
  if (t == 0 || t > channels) {
    throw Error(Errc::kInvalidArgument,
                "cascade: split " + std::to_string(t) + " must lie in [1, " +
                    std::to_string(channels) + "]");
  }
  CascadePlan plan;
  plan.channels = channels;
  plan.boundaries.reserve(t + 1);
  const std::size_t base = channels / t;
  const std::size_t wide = channels % t;
  std::size_t at = 0;
  plan.boundaries.push_back(0);
  for (std::size_t i = 0; i < t; ++i) {
    at += base + (i < wide ? 1 : 0);
    plan.boundaries.push_back(at);
  }
  return plan;
}

std::size_t CascadePlan::max_group_width() const noexcept {
  std::size_t widest = 0;
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
    widest = std::max(widest, boundaries[i + 1] - boundaries[i]);
  }
  return widest;
}

void MemoryMeter::acquire(std::uint64_t bytes) {
  live_ += bytes;
  peak_ = std::max(peak_, live_);
}

void MemoryMeter::release(std::uint64_t bytes) {
  if (bytes > live_) throw Error(Errc::kInvariant, "memory meter released more than it holds");
  live_ -= bytes;
}

CascadeResult cascade_execute(const Tensor& input, const BottleneckParams& p,
                              const CascadePlan& plan, const ExecContext& ctx) {
  p.validate();
  if (input.shape().channels != p.in_channels) {
    throw Error(Errc::kChannelMismatch,
                "cascade: input has " + std::to_string(input.shape().channels) +
                    " channels, block expects " + std::to_string(p.in_channels));
  }
  if (plan.channels != p.expanded_channels || plan.groups() == 0 ||
      plan.boundaries.back() != plan.channels) {
    throw Error(Errc::kInvalidArgument, "cascade: plan does not cover the expanded channels");
  }

  constexpr std::uint64_t kFloat = sizeof(float);
  MemoryMeter meter;
  meter.acquire(input.size() * kFloat);

  const Shape& in = input.shape();
  Tensor out(Shape{in.batch, same_output_extent(in.height, p.stride),
                   same_output_extent(in.width, p.stride), p.out_channels});
  meter.acquire(out.size() * kFloat);

  for (std::size_t i = 0; i < plan.groups(); ++i) {
    const std::size_t g0 = plan.boundaries[i];
    const std::size_t g1 = plan.boundaries[i + 1];
    if (g1 <= g0) throw Error(Errc::kInvalidArgument, "cascade: empty channel group");

    const Tensor expanded = p.expand ? relu6(conv2d(input, p.expand->slice_outputs(g0, g1), ctx))
                                     : slice_channels(input, g0, g1);
    meter.acquire(expanded.size() * kFloat);
    const Tensor filtered =
        relu6(depthwise_conv(expanded, p.depthwise.slice_channels(g0, g1), ctx));
    meter.acquire(filtered.size() * kFloat);

    conv2d_accumulate(filtered, p.project.slice_inputs(g0, g1), out, ctx);

    meter.release(filtered.size() * kFloat);
    meter.release(expanded.size() * kFloat);
  }

  if (!p.project.bias.empty()) add_bias_inplace(out, p.project.bias);
  if (p.residual) out = add_residual(out, input);
  return CascadeResult{std::move(out), meter.peak()};
}

std::uint64_t cascade_peak_bytes(const BottleneckGeometry& g, std::size_t t,
                                 std::size_t bytes_per_element) {
  const std::size_t n = expanded_width(g.in_channels, g.expansion);
  const std::size_t widest = CascadePlan::make(n, t).max_group_width();
  const std::uint64_t in_pixels = std::uint64_t{g.height} * g.width;
  const std::uint64_t out_pixels = std::uint64_t{same_output_extent(g.height, g.stride)} *
                                   same_output_extent(g.width, g.stride);
  const std::uint64_t elements = in_pixels * g.in_channels + out_pixels * g.out_channels +
                                 std::uint64_t{widest} * (in_pixels + out_pixels);
  return elements * bytes_per_element;
}

}  // namespace btn
