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

#include "btn/cost_model.hpp"

#include "btn/blocks.hpp"
#include "btn/error.hpp"
#include "btn/kernels.hpp"

namespace btn {
namespace {

std::uint64_t out_pixels(std::size_t h, std::size_t w, std::size_t stride) {
  return std::uint64_t{same_output_extent(h, stride)} * same_output_extent(w, stride);
}

}  // namespace

std::uint64_t madds_standard_conv(std::size_t h, std::size_t w, std::size_t in_channels,
                                  std::size_t out_channels, std::size_t kernel,
                                  std::size_t stride) {
  return out_pixels(h, w, stride) * in_channels * out_channels * kernel * kernel;
}

std::uint64_t madds_depthwise(std::size_t h, std::size_t w, std::size_t channels,
                              std::size_t kernel, std::size_t stride) {
  return out_pixels(h, w, stride) * channels * kernel * kernel;
}

std::uint64_t madds_depthwise_separable(std::size_t h, std::size_t w, std::size_t in_channels,
                                        std::size_t out_channels, std::size_t kernel,
                                        std::size_t stride) {
  return out_pixels(h, w, stride) * in_channels * (kernel * kernel + out_channels);
}

std::uint64_t CostReport::params_with_batchnorm() const {
  std::uint64_t total = 0;
  for (const CostRow& r : rows) {
    // Folded biases of batch-normalized layers are replaced by scale+offset.
    const std::uint64_t folded_bias = r.bn_params / 2;
    total += r.params - folded_bias + r.bn_params;
  }
  return total;
}

CostReport model_cost(const ModelSpec& spec) {
  CostReport report;
  report.width_multiplier = spec.width_multiplier;
  report.input_resolution = spec.input_resolution;

  for (const LayerGeometry& g : model_layout(spec)) {
    CostRow row;
    row.name = g.name;
    row.kind = g.kind;
    row.out_height = g.out_height;
    row.out_width = g.out_width;
    row.out_channels = g.out_channels;
    switch (g.kind) {
      case LayerKind::kStem:
      case LayerKind::kHead:
        row.madds = madds_standard_conv(g.in_height, g.in_width, g.in_channels, g.out_channels,
                                        g.kernel, g.stride);
        row.params = std::uint64_t{g.kernel} * g.kernel * g.in_channels * g.out_channels +
                     g.out_channels;
        row.bn_params = 2 * std::uint64_t{g.out_channels};
        break;
      case LayerKind::kBottleneck: {
        const std::uint64_t n = g.expanded_channels;
        row.madds = bottleneck_madds({.height = g.in_height,
                                      .width = g.in_width,
                                      .in_channels = g.in_channels,
                                      .out_channels = g.out_channels,
                                      .expansion = g.expansion,
                                      .kernel = g.kernel,
                                      .stride = g.stride,
                                      .expand_conv = g.expand_conv});
        const std::uint64_t expand = g.expand_conv ? g.in_channels * n + n : 0;
        const std::uint64_t depthwise = g.kernel * g.kernel * n + n;
        const std::uint64_t project = n * g.out_channels + g.out_channels;
        row.params = expand + depthwise + project;
        row.bn_params = 2 * ((g.expand_conv ? n : 0) + n + g.out_channels);
        break;
      }
      case LayerKind::kPool:
        break;
      case LayerKind::kClassifier:
        row.madds = madds_standard_conv(1, 1, g.in_channels, g.out_channels, 1, 1);
        row.params = std::uint64_t{g.in_channels} * g.out_channels + g.out_channels;
        report.classifier_madds = row.madds;
        report.classifier_params = row.params;
        break;
    }
    report.total_madds += row.madds;
    report.total_params += row.params;
    report.total_bn_params += row.bn_params;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::uint64_t instrumented_count(const Model& model, const Tensor& input, std::size_t split) {
  if (input.shape().batch != 1) {
    throw Error(Errc::kInvalidArgument, "instrumented_count expects a batch of one");
  }
  MaddCounter counter;
  ForwardOptions options;
  options.split = split;
  options.ctx.counter = &counter;
  forward(model, input, options);
  return counter.madds;
}

}  // namespace btn
