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

#include "btn/compute_graph.hpp"

#include <ostream>

#include <json.hpp>

#include "btn/error.hpp"

namespace btn {

std::size_t ComputeGraph::add_tensor(std::string name, std::uint64_t bytes) {
  tensors_.push_back({std::move(name), bytes});
  producer_.emplace_back();
  consumers_.emplace_back();
  return tensors_.size() - 1;
}

std::size_t ComputeGraph::add_op(std::string name, std::vector<std::size_t> inputs,
                                 std::vector<std::size_t> outputs, std::uint64_t workspace) {
  const std::size_t id = ops_.size();
  for (std::size_t t : inputs) {
    if (t >= tensors_.size()) throw Error(Errc::kInvalidArgument, "op '" + name + "' reads unknown tensor");
  }
  for (std::size_t t : outputs) {
    if (t >= tensors_.size()) throw Error(Errc::kInvalidArgument, "op '" + name + "' writes unknown tensor");
    if (producer_[t]) {
      throw Error(Errc::kInvalidArgument,
                  "tensor '" + tensors_[t].name + "' already produced by op '" +
                      ops_[*producer_[t]].name + "'");
    }
  }
  for (std::size_t t : outputs) producer_[t] = id;
  for (std::size_t t : inputs) consumers_[t].push_back(id);
  ops_.push_back({std::move(name), std::move(inputs), std::move(outputs), workspace});
  return id;
}

std::optional<std::size_t> ComputeGraph::producer(std::size_t tensor) const {
  return producer_.at(tensor);
}

const std::vector<std::size_t>& ComputeGraph::consumers(std::size_t tensor) const {
  return consumers_.at(tensor);
}

void ComputeGraph::validate_acyclic() const {
  std::vector<std::size_t> pending(ops_.size(), 0);
  for (std::size_t o = 0; o < ops_.size(); ++o) {
    for (std::size_t t : ops_[o].inputs) {
      if (producer_[t]) ++pending[o];
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t o = 0; o < ops_.size(); ++o) {
    if (pending[o] == 0) ready.push_back(o);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t o = ready.back();
    ready.pop_back();
    ++visited;
    for (std::size_t t : ops_[o].outputs) {
      for (std::size_t c : consumers_[t]) {
        if (--pending[c] == 0) ready.push_back(c);
      }
    }
  }
  if (visited != ops_.size()) throw Error(Errc::kInvalidArgument, "compute graph has a cycle");
}

void write_graph_jsonl(std::ostream& out, const ComputeGraph& graph) {
  for (std::size_t t = 0; t < graph.tensors().size(); ++t) {
    const auto& tensor = graph.tensors()[t];
    nlohmann::ordered_json line;
    line["kind"] = "tensor";
    line["id"] = t;
    line["name"] = tensor.name;
    line["bytes"] = tensor.bytes;
    out << line.dump() << '\n';
  }
  for (std::size_t o = 0; o < graph.ops().size(); ++o) {
    const auto& op = graph.ops()[o];
    nlohmann::ordered_json line;
    line["kind"] = "op";
    line["id"] = o;
    line["name"] = op.name;
    line["inputs"] = op.inputs;
    line["outputs"] = op.outputs;
    line["workspace"] = op.workspace;
    out << line.dump() << '\n';
  }
}

}  // namespace btn
