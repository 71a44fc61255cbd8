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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace btn {

struct GraphTensor {
  std::string name;
  std::uint64_t bytes = 0;
};

struct GraphOp {
  std::string name;
  std::vector<std::size_t> inputs;
  std::vector<std::size_t> outputs;
  /// Internal scratch the op holds while it runs.
  std::uint64_t workspace = 0;
};

/// Operations over tensor nodes. Each tensor has at most one producer;
/// tensors without a producer are graph inputs.
class ComputeGraph {
 public:
  std::size_t add_tensor(std::string name, std::uint64_t bytes);
  /// Throws Errc::kInvalidArgument on unknown ids or a second producer.
  std::size_t add_op(std::string name, std::vector<std::size_t> inputs,
                     std::vector<std::size_t> outputs, std::uint64_t workspace = 0);

  const std::vector<GraphTensor>& tensors() const noexcept { return tensors_; }
  const std::vector<GraphOp>& ops() const noexcept { return ops_; }

  std::optional<std::size_t> producer(std::size_t tensor) const;
  const std::vector<std::size_t>& consumers(std::size_t tensor) const;

  /// Throws Errc::kInvalidArgument if the op relation has a cycle.
  void validate_acyclic() const;

 private:
  std::vector<GraphTensor> tensors_;
  std::vector<GraphOp> ops_;
  std::vector<std::optional<std::size_t>> producer_;
  std::vector<std::vector<std::size_t>> consumers_;
};

/// JSON-lines dump: one {"kind":"tensor",...} line per tensor followed by one
/// {"kind":"op",...} line per op, both in id order.
void write_graph_jsonl(std::ostream& out, const ComputeGraph& graph);

}  // namespace btn
