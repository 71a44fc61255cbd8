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

#include "btn/blocks.hpp"

namespace btn {

/// Partition of a block's expanded channels into t contiguous groups. Group
/// widths differ by at most one (the first n mod t groups are one wider), so
/// the widest group is ceil(n/t) channels.
struct CascadePlan {
  std::size_t channels = 0;
  /// boundaries[i] .. boundaries[i+1] is group i; size groups() + 1.
  std::vector<std::size_t> boundaries;

  /// Throws Errc::kInvalidArgument when t == 0 or t > channels.
  static CascadePlan make(std::size_t channels, std::size_t t);

  std::size_t groups() const noexcept { return boundaries.size() - 1; }
  std::size_t max_group_width() const noexcept;
};

/// Tracks live bytes of explicitly allocated activation buffers.
class MemoryMeter {
 public:
  void acquire(std::uint64_t bytes);
  void release(std::uint64_t bytes);
  std::uint64_t live() const noexcept { return live_; }
  std::uint64_t peak() const noexcept { return peak_; }

 private:
  std::uint64_t live_ = 0;
  std::uint64_t peak_ = 0;
};

struct CascadeResult {
  Tensor output;
  /// Peak of input + output accumulator + the one live group's intermediates,
  /// measured in float32 bytes. Kernel-internal padding copies are excluded.
  std::uint64_t peak_bytes = 0;
};

/// Evaluates a bottleneck as sum_i project_i(N(expand_i(x))) with one channel
/// group alive at a time. Groups run sequentially in index order and each
/// projection slice continues the output accumulation, so the result is
/// bit-identical to bottleneck_forward for every plan.
CascadeResult cascade_execute(const Tensor& input, const BottleneckParams& p,
                              const CascadePlan& plan, const ExecContext& ctx = {});

/// Closed form of the cascade peak for a block geometry:
/// (|in| + |out| + ceil(n/t) * (h*w + h'*w')) * bytes_per_element.
std::uint64_t cascade_peak_bytes(const BottleneckGeometry& g, std::size_t t,
                                 std::size_t bytes_per_element);

}  // namespace btn
