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
#include <vector>

#include "btn/architecture.hpp"
#include "btn/compute_graph.hpp"

namespace btn {

/// A total order of op ids.
using Schedule = std::vector<std::size_t>;

struct StepUsage {
  std::size_t op = 0;
  /// Bytes of tensors live during the step, including the op's own outputs.
  std::uint64_t live_bytes = 0;
  std::uint64_t workspace = 0;
  std::uint64_t total() const noexcept { return live_bytes + workspace; }
};

/// Materialized activation memory charged to one spatial resolution.
struct ResolutionRow {
  std::size_t resolution = 0;
  std::size_t max_channels = 0;
  std::uint64_t bytes = 0;
  /// Largest input + output footprint of an op charged to this row.
  std::uint64_t io_bytes = 0;
  /// Row is evaluated channel by channel and holds one channel at a time.
  bool streamed = false;
};

struct MemoryReport {
  Schedule order;
  std::vector<StepUsage> steps;
  std::uint64_t peak_bytes = 0;
  std::size_t peak_step = 0;

  std::vector<ResolutionRow> rows;
  std::uint64_t max_row_bytes = 0;
  std::size_t bytes_per_element = 0;
  std::size_t split = 1;
  /// Peak of the first bottleneck evaluated as a cascade with `split` groups.
  std::uint64_t first_block_cascade_peak = 0;
};

bool is_topological(const ComputeGraph& graph, const Schedule& order);

/// Per-step live bytes for a fixed order. A tensor is live from its producing
/// step (step 0 for graph inputs) through its last consuming step; an output
/// nobody reads is live only at the step producing it. Throws
/// Errc::kNotTopological for an invalid order.
MemoryReport schedule_memory(const ComputeGraph& graph, const Schedule& order);

struct PlanResult {
  Schedule schedule;
  std::uint64_t peak_bytes = 0;
  /// False when the schedule came from the greedy fallback.
  bool optimal = false;
};

struct SearchOptions {
  std::size_t max_exact_ops = 16;
};

/// Exact minimum-peak order by branch-and-bound over topological orders with
/// memoization on the set of scheduled ops. Among optimal orders the
/// lexicographically smallest op sequence is returned. Throws
/// Errc::kGraphTooLarge above options.max_exact_ops.
PlanResult min_memory_schedule(const ComputeGraph& graph, const SearchOptions& options = {});

/// Repeatedly runs the ready op with the cheapest step, lowest id first on
/// ties. Not optimal in general.
PlanResult greedy_schedule(const ComputeGraph& graph);

/// Exact search when the graph fits the bound, greedy otherwise.
PlanResult plan_schedule(const ComputeGraph& graph, const SearchOptions& options = {});

/// True when the graph admits exactly one topological order and every tensor
/// is read only by the op right after its producer (graph inputs only by the
/// first op).
bool has_trivial_parallel_structure(const ComputeGraph& graph);

/// max over ops of (sum of inputs + sum of outputs + workspace). Throws
/// Errc::kNonTrivialParallelism unless has_trivial_parallel_structure holds.
std::uint64_t linear_bound_memory(const ComputeGraph& graph);

/// The network as a chain of single-op blocks: image, stem, one op per
/// bottleneck, head, pool, classifier. Each block's workspace is its widest
/// cascade group at both resolutions for the given split (clamped to the
/// block's expanded width).
ComputeGraph model_block_graph(const ModelSpec& spec, std::size_t bytes_per_element,
                               std::size_t split = 1);

struct MemoryTableOptions {
  std::size_t bytes_per_element = 2;
  /// Stream the stem and the ops at its output resolution one channel at a
  /// time, so that region holds a single channel.
  bool first_layer_trick = true;
  std::size_t split = 1;
};

/// Max materialized channels and bytes per spatial resolution with every block
/// treated as a single op. A block is charged its output width at its input
/// resolution; the stem at its output resolution; the head, fused with global
/// pooling, and the classifier at 1x1. The report also carries the block
/// graph's schedule.
MemoryReport memory_table(const ModelSpec& spec, const MemoryTableOptions& options = {});

}  // namespace btn
