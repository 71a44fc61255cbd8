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

#include <initializer_list>
#include <utility>

#include "btn/blocks.hpp"
#include "btn/compute_graph.hpp"
#include "btn/kernels.hpp"
#include "btn/rng.hpp"

namespace btn::testing {

inline Conv2dParams random_conv(Rng& rng, std::size_t k, std::size_t s, std::size_t in,
                                std::size_t out, bool bias = true) {
  Conv2dParams p = Conv2dParams::zeros(k, s, in, out);
  fill_gaussian(p.weights, rng, 0.0, 0.5);
  if (!bias) p.bias.clear();
  else fill_gaussian(p.bias, rng, 0.0, 0.1);
  return p;
}

inline DepthwiseParams random_depthwise(Rng& rng, std::size_t s, std::size_t c) {
  DepthwiseParams p = DepthwiseParams::zeros(3, s, c);
  fill_gaussian(p.weights, rng, 0.0, 0.5);
  fill_gaussian(p.bias, rng, 0.0, 0.1);
  return p;
}

inline BottleneckParams random_bottleneck(Rng& rng, const BottleneckConfig& config) {
  BottleneckParams p = make_bottleneck(config);
  if (p.expand) {
    fill_gaussian(p.expand->weights, rng, 0.0, 0.3);
    fill_gaussian(p.expand->bias, rng, 0.0, 0.1);
  }
  fill_gaussian(p.depthwise.weights, rng, 0.0, 0.3);
  fill_gaussian(p.depthwise.bias, rng, 0.0, 0.1);
  fill_gaussian(p.project.weights, rng, 0.0, 0.3);
  fill_gaussian(p.project.bias, rng, 0.0, 0.1);
  return p;
}

/// Graph from (inputs, outputs) tensor-id lists over pre-sized tensors.
inline ComputeGraph make_graph(
    std::initializer_list<std::uint64_t> sizes,
    std::initializer_list<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> ops) {
  ComputeGraph g;
  std::size_t i = 0;
  for (std::uint64_t s : sizes) g.add_tensor("t" + std::to_string(i++), s);
  std::size_t o = 0;
  for (const auto& [in, out] : ops) g.add_op("op" + std::to_string(o++), in, out);
  return g;
}

/// x(10) -> A1(50) -> A2(50), x -> B1(160) -> B2(90), join(A2, B2) -> y(10).
/// Ops: 0 A1, 1 A2, 2 B1, 3 B2, 4 J. Running the A branch first peaks at 300
/// bytes, the B branch first at 260.
inline ComputeGraph diamond_graph() {
  ComputeGraph g;
  const auto x = g.add_tensor("x", 10);
  const auto a1 = g.add_tensor("a1", 50);
  const auto a2 = g.add_tensor("a2", 50);
  const auto b1 = g.add_tensor("b1", 160);
  const auto b2 = g.add_tensor("b2", 90);
  const auto y = g.add_tensor("y", 10);
  g.add_op("A1", {x}, {a1});
  g.add_op("A2", {a1}, {a2});
  g.add_op("B1", {x}, {b1});
  g.add_op("B2", {b1}, {b2});
  g.add_op("J", {a2, b2}, {y});
  return g;
}

}  // namespace btn::testing
