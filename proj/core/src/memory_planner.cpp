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

#include "btn/memory_planner.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

#include "btn/cascade.hpp"
#include "btn/error.hpp"

namespace btn {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Step indices bounding each tensor's lifetime under one order.
struct Lifetime {
  std::size_t first = kNone;
  std::size_t last = kNone;
};

// Op sets as bitmasks; used by the exact and greedy searches.
class MaskModel {
 public:
  explicit MaskModel(const ComputeGraph& g) : graph_(g) {
    const std::size_t ops = g.ops().size();
    deps_.assign(ops, 0);
    for (std::size_t o = 0; o < ops; ++o) {
      for (std::size_t t : g.ops()[o].inputs) {
        if (auto p = g.producer(t)) deps_[o] |= bit(*p);
      }
    }
    readers_.assign(g.tensors().size(), 0);
    for (std::size_t t = 0; t < g.tensors().size(); ++t) {
      for (std::size_t c : g.consumers(t)) readers_[t] |= bit(c);
    }
  }

  static std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

  bool ready(std::uint64_t done, std::size_t op) const {
    return (done & bit(op)) == 0 && (deps_[op] & ~done) == 0;
  }

  // Bytes held while `op` runs after every op in `done`.
  std::uint64_t step_cost(std::uint64_t done, std::size_t op) const {
    std::uint64_t bytes = graph_.ops()[op].workspace;
    for (std::size_t t = 0; t < graph_.tensors().size(); ++t) {
      const auto p = graph_.producer(t);
      const bool available = !p || (done & bit(*p)) != 0;
      if (available && (readers_[t] & ~done) != 0) bytes += graph_.tensors()[t].bytes;
    }
    for (std::size_t t : graph_.ops()[op].outputs) bytes += graph_.tensors()[t].bytes;
    return bytes;
  }

 private:
  const ComputeGraph& graph_;
  std::vector<std::uint64_t> deps_;
  std::vector<std::uint64_t> readers_;
};

class ExactSearch {
 public:
  ExactSearch(const ComputeGraph& g) : model_(g), ops_(g.ops().size()) {
    full_ = ops_ == 64 ? ~std::uint64_t{0} : MaskModel::bit(ops_) - 1;
  }

  // Minimum achievable peak over the ops not in `done`.
  std::uint64_t best(std::uint64_t done) {
    if (done == full_) return 0;
    if (auto it = memo_.find(done); it != memo_.end()) return it->second;
    std::uint64_t bound = std::numeric_limits<std::uint64_t>::max();
    for (std::size_t o = 0; o < ops_; ++o) {
      if (!model_.ready(done, o)) continue;
      const std::uint64_t step = model_.step_cost(done, o);
      if (step >= bound) continue;
      bound = std::min(bound, std::max(step, best(done | MaskModel::bit(o))));
    }
    memo_.emplace(done, bound);
    return bound;
  }

  Schedule reconstruct(std::uint64_t peak) {
    Schedule order;
    std::uint64_t done = 0;
    while (done != full_) {
      std::size_t pick = kNone;
      for (std::size_t o = 0; o < ops_ && pick == kNone; ++o) {
        if (!model_.ready(done, o)) continue;
        const std::uint64_t next = done | MaskModel::bit(o);
        if (model_.step_cost(done, o) <= peak && best(next) <= peak) pick = o;
      }
      if (pick == kNone) throw Error(Errc::kInvariant, "schedule reconstruction failed");
      order.push_back(pick);
      done |= MaskModel::bit(pick);
    }
    return order;
  }

 private:
  MaskModel model_;
  std::size_t ops_;
  std::uint64_t full_;
  std::unordered_map<std::uint64_t, std::uint64_t> memo_;
};

std::uint64_t activation_bytes(std::size_t h, std::size_t w, std::size_t c, std::size_t bpe) {
  return std::uint64_t{h} * w * c * bpe;
}

}  // namespace

bool is_topological(const ComputeGraph& graph, const Schedule& order) {
  const std::size_t ops = graph.ops().size();
  if (order.size() != ops) return false;
  std::vector<bool> done(ops, false);
  for (std::size_t o : order) {
    if (o >= ops || done[o]) return false;
    for (std::size_t t : graph.ops()[o].inputs) {
      if (auto p = graph.producer(t); p && !done[*p]) return false;
    }
    done[o] = true;
  }
  return true;
}

MemoryReport schedule_memory(const ComputeGraph& graph, const Schedule& order) {
  if (!is_topological(graph, order)) {
    throw Error(Errc::kNotTopological, "schedule is not a topological order of the graph");
  }
  std::vector<std::size_t> step_of(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) step_of[order[i]] = i;

  std::vector<Lifetime> life(graph.tensors().size());
  for (std::size_t t = 0; t < graph.tensors().size(); ++t) {
    const auto& readers = graph.consumers(t);
    const auto p = graph.producer(t);
    if (readers.empty()) {
      if (p) life[t] = {step_of[*p], step_of[*p]};
      continue;
    }
    std::size_t last = 0;
    for (std::size_t c : readers) last = std::max(last, step_of[c]);
    life[t] = {p ? step_of[*p] : 0, last};
  }

  MemoryReport report;
  report.order = order;
  for (std::size_t i = 0; i < order.size(); ++i) {
    StepUsage step;
    step.op = order[i];
    step.workspace = graph.ops()[order[i]].workspace;
    for (std::size_t t = 0; t < life.size(); ++t) {
      if (life[t].first != kNone && life[t].first <= i && i <= life[t].last) {
        step.live_bytes += graph.tensors()[t].bytes;
      }
    }
    if (step.total() > report.peak_bytes || i == 0) {
      report.peak_bytes = step.total();
      report.peak_step = i;
    }
    report.steps.push_back(step);
  }
  return report;
}

PlanResult min_memory_schedule(const ComputeGraph& graph, const SearchOptions& options) {
  graph.validate_acyclic();
  const std::size_t ops = graph.ops().size();
  const std::size_t limit = std::min<std::size_t>(options.max_exact_ops, 64);
  if (ops > limit) {
    throw Error(Errc::kGraphTooLarge, "exact schedule search supports at most " +
                                          std::to_string(limit) + " ops, graph has " +
                                          std::to_string(ops));
  }
  PlanResult result;
  result.optimal = true;
  if (ops == 0) return result;
  ExactSearch search(graph);
  result.peak_bytes = search.best(0);
  result.schedule = search.reconstruct(result.peak_bytes);
  return result;
}

PlanResult greedy_schedule(const ComputeGraph& graph) {
  graph.validate_acyclic();
  const std::size_t ops = graph.ops().size();
  std::vector<bool> done(ops, false);
  PlanResult result;
  for (std::size_t step = 0; step < ops; ++step) {
    std::size_t pick = kNone;
    std::uint64_t pick_cost = 0;
    for (std::size_t o = 0; o < ops; ++o) {
      if (done[o]) continue;
      bool ready = true;
      for (std::size_t t : graph.ops()[o].inputs) {
        if (auto p = graph.producer(t); p && !done[*p]) ready = false;
      }
      if (!ready) continue;
      std::uint64_t cost = graph.ops()[o].workspace;
      for (std::size_t t = 0; t < graph.tensors().size(); ++t) {
        const auto p = graph.producer(t);
        const bool available = !p || done[*p];
        bool needed = false;
        for (std::size_t c : graph.consumers(t)) needed = needed || !done[c];
        if (available && needed) cost += graph.tensors()[t].bytes;
      }
      for (std::size_t t : graph.ops()[o].outputs) cost += graph.tensors()[t].bytes;
      if (pick == kNone || cost < pick_cost) {
        pick = o;
        pick_cost = cost;
      }
    }
    done[pick] = true;
    result.schedule.push_back(pick);
  }
  result.peak_bytes = ops == 0 ? 0 : schedule_memory(graph, result.schedule).peak_bytes;
  result.optimal = false;
  return result;
}

PlanResult plan_schedule(const ComputeGraph& graph, const SearchOptions& options) {
  if (graph.ops().size() <= options.max_exact_ops && graph.ops().size() <= 64) {
    return min_memory_schedule(graph, options);
  }
  return greedy_schedule(graph);
}

bool has_trivial_parallel_structure(const ComputeGraph& graph) {
  graph.validate_acyclic();
  const std::size_t ops = graph.ops().size();
  // Unique topological order: Kahn's algorithm never sees two ready ops.
  std::vector<std::size_t> pending(ops, 0);
  for (std::size_t o = 0; o < ops; ++o) {
    for (std::size_t t : graph.ops()[o].inputs) {
      if (graph.producer(t)) ++pending[o];
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t o = 0; o < ops; ++o) {
    if (pending[o] == 0) ready.push_back(o);
  }
  Schedule order;
  while (!ready.empty()) {
    if (ready.size() > 1) return false;
    const std::size_t o = ready.back();
    ready.pop_back();
    order.push_back(o);
    for (std::size_t t : graph.ops()[o].outputs) {
      for (std::size_t c : graph.consumers(t)) {
        if (--pending[c] == 0) ready.push_back(c);
      }
    }
  }
  if (order.empty()) return true;

  std::vector<std::size_t> step_of(ops);
  for (std::size_t i = 0; i < ops; ++i) step_of[order[i]] = i;
  for (std::size_t t = 0; t < graph.tensors().size(); ++t) {
    const auto p = graph.producer(t);
    const std::size_t expected = p ? step_of[*p] + 1 : 0;
    for (std::size_t c : graph.consumers(t)) {
      if (step_of[c] != expected) return false;
    }
  }
  return true;
}

std::uint64_t linear_bound_memory(const ComputeGraph& graph) {
  if (!has_trivial_parallel_structure(graph)) {
    throw Error(Errc::kNonTrivialParallelism,
                "graph has more than one feasible order or long-lived tensors");
  }
  std::uint64_t peak = 0;
  for (const GraphOp& op : graph.ops()) {
    std::uint64_t bytes = op.workspace;
    for (std::size_t t : op.inputs) bytes += graph.tensors()[t].bytes;
    for (std::size_t t : op.outputs) bytes += graph.tensors()[t].bytes;
    peak = std::max(peak, bytes);
  }
  return peak;
}

ComputeGraph model_block_graph(const ModelSpec& spec, std::size_t bytes_per_element,
                               std::size_t split) {
  if (bytes_per_element == 0) {
    throw Error(Errc::kInvalidArgument, "bytes per element must be positive");
  }
  if (split == 0) throw Error(Errc::kInvalidArgument, "split must be at least 1");
  const auto layout = model_layout(spec);
  ComputeGraph graph;
  const LayerGeometry& first = layout.front();
  std::size_t current =
      graph.add_tensor("input", activation_bytes(first.in_height, first.in_width,
                                                 first.in_channels, bytes_per_element));
  for (const LayerGeometry& g : layout) {
    const std::size_t out = graph.add_tensor(
        g.name, activation_bytes(g.out_height, g.out_width, g.out_channels, bytes_per_element));
    std::uint64_t workspace = 0;
    if (g.kind == LayerKind::kBottleneck) {
      const std::size_t t = std::min(split, g.expanded_channels);
      const std::size_t widest = CascadePlan::make(g.expanded_channels, t).max_group_width();
      workspace = std::uint64_t{widest} *
                  (std::uint64_t{g.in_height} * g.in_width +
                   std::uint64_t{g.out_height} * g.out_width) *
                  bytes_per_element;
    }
    graph.add_op(g.name, {current}, {out}, workspace);
    current = out;
  }
  return graph;
}

MemoryReport memory_table(const ModelSpec& spec, const MemoryTableOptions& options) {
  if (options.bytes_per_element == 0) {
    throw Error(Errc::kInvalidArgument, "bytes per element must be positive");
  }
  if (options.split == 0) throw Error(Errc::kInvalidArgument, "split must be at least 1");
  const std::size_t bpe = options.bytes_per_element;
  const auto layout = model_layout(spec);
  const ComputeGraph graph = model_block_graph(spec, bpe, options.split);

  Schedule order(graph.ops().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  MemoryReport report = schedule_memory(graph, order);
  report.bytes_per_element = bpe;
  report.split = options.split;

  const std::size_t streamed_res = layout.front().out_height;
  std::map<std::size_t, ResolutionRow, std::greater<>> rows;
  for (const LayerGeometry& g : layout) {
    std::size_t res = g.in_height;
    switch (g.kind) {
      case LayerKind::kStem:
        res = g.out_height;
        break;
      case LayerKind::kBottleneck:
        break;
      case LayerKind::kHead:
      case LayerKind::kClassifier:
        res = 1;
        break;
      case LayerKind::kPool:
        continue;
    }
    ResolutionRow& row = rows[res];
    row.resolution = res;
    const bool streamed = options.first_layer_trick && res == streamed_res;
    row.streamed = streamed;
    const std::size_t channels = streamed ? 1 : g.out_channels;
    row.max_channels = std::max(row.max_channels, channels);
    row.bytes = activation_bytes(res, res, row.max_channels, bpe);
    row.io_bytes = std::max(
        row.io_bytes, activation_bytes(g.in_height, g.in_width, g.in_channels, bpe) +
                          activation_bytes(g.out_height, g.out_width, g.out_channels, bpe));
  }
  for (auto& [res, row] : rows) {
    report.rows.push_back(row);
    report.max_row_bytes = std::max(report.max_row_bytes, row.bytes);
  }

  for (const LayerGeometry& g : layout) {
    if (g.kind != LayerKind::kBottleneck) continue;
    BottleneckGeometry bg;
    bg.height = g.in_height;
    bg.width = g.in_width;
    bg.in_channels = g.in_channels;
    bg.out_channels = g.out_channels;
    bg.expansion = g.expansion;
    bg.stride = g.stride;
    bg.expand_conv = g.expand_conv;
    report.first_block_cascade_peak =
        cascade_peak_bytes(bg, std::min(options.split, g.expanded_channels), bpe);
    break;
  }
  return report;
}

}  // namespace btn
