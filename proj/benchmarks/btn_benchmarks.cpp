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

#include <benchmark/benchmark.h>

#include <algorithm>

#include "btn/architecture.hpp"
#include "btn/cascade.hpp"
#include "btn/memory_planner.hpp"

namespace btn {
namespace {

const Model& random_model() {
  static const Model model = build_model(ModelSpec{}, WeightInit::kRandom, 1);
  return model;
}

// First residual block with 64 channels in and out (14x14 at 224 input).
const BottleneckParams& block_64() {
  const auto& blocks = random_model().blocks;
  return *std::find_if(blocks.begin(), blocks.end(), [](const BottleneckParams& b) {
    return b.in_channels == 64 && b.out_channels == 64 && b.residual;
  });
}

Tensor random_input(const Shape& shape) {
  Rng rng(7);
  return tensor_random_gaussian(shape, rng, 0.0f, 1.0f);
}

void BM_Conv2dStem(benchmark::State& state) {
  const Tensor in = random_input({1, 224, 224, 3});
  const Conv2dParams& stem = random_model().stem;
  for (auto _ : state) benchmark::DoNotOptimize(conv2d(in, stem));
}
BENCHMARK(BM_Conv2dStem)->Unit(benchmark::kMillisecond);

void BM_Conv2dPointwise(benchmark::State& state) {
  const BottleneckParams& b = block_64();
  const Tensor in = random_input({1, 14, 14, 64});
  for (auto _ : state) benchmark::DoNotOptimize(conv2d(in, *b.expand));
}
BENCHMARK(BM_Conv2dPointwise)->Unit(benchmark::kMicrosecond);

void BM_Depthwise(benchmark::State& state) {
  const BottleneckParams& b = block_64();
  const Tensor in = random_input({1, 14, 14, b.expanded_channels});
  for (auto _ : state) benchmark::DoNotOptimize(depthwise_conv(in, b.depthwise));
}
BENCHMARK(BM_Depthwise)->Unit(benchmark::kMicrosecond);

void BM_Bottleneck(benchmark::State& state) {
  const Tensor in = random_input({1, 14, 14, 64});
  const BottleneckParams& b = block_64();
  for (auto _ : state) benchmark::DoNotOptimize(bottleneck_forward(in, b));
}
BENCHMARK(BM_Bottleneck)->Unit(benchmark::kMicrosecond);

void BM_Cascade(benchmark::State& state) {
  const BottleneckParams& b = block_64();
  const Tensor in = random_input({1, 14, 14, 64});
  const CascadePlan plan =
      CascadePlan::make(b.expanded_channels, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cascade_execute(in, b, plan));
}
BENCHMARK(BM_Cascade)->Arg(1)->Arg(2)->Arg(6)->Arg(48)->Arg(384)->Unit(benchmark::kMicrosecond);

void BM_Forward(benchmark::State& state) {
  const Tensor in = random_input({1, 224, 224, 3});
  const Model& model = random_model();
  for (auto _ : state) benchmark::DoNotOptimize(forward(model, in));
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMillisecond)->Iterations(3);

// Layered DAG: `width` parallel ops per level, each reading every op of the
// previous level.
ComputeGraph layered_graph(std::size_t levels, std::size_t width) {
  ComputeGraph g;
  std::vector<std::size_t> prev{g.add_tensor("input", 64)};
  for (std::size_t l = 0; l < levels; ++l) {
    std::vector<std::size_t> cur;
    for (std::size_t w = 0; w < width; ++w) {
      const std::size_t t = g.add_tensor("t", 16 * (1 + (l * width + w) % 5));
      g.add_op("op", prev, {t}, 8 * w);
      cur.push_back(t);
    }
    prev = cur;
  }
  return g;
}

void BM_PlannerExact(benchmark::State& state) {
  const ComputeGraph g = layered_graph(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(min_memory_schedule(g));
}
BENCHMARK(BM_PlannerExact)->Arg(2)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_PlannerGreedy(benchmark::State& state) {
  const ComputeGraph g = layered_graph(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_schedule(g));
}
BENCHMARK(BM_PlannerGreedy)->Arg(5)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_MemoryTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(memory_table(ModelSpec{}));
}
BENCHMARK(BM_MemoryTable)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace btn

BENCHMARK_MAIN();
