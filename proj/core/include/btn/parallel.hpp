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
#include <functional>

namespace btn {

/// Tally of multiply-accumulates actually executed by instrumented kernels.
struct MaddCounter {
  std::uint64_t madds = 0;
};

/// Per-call execution knobs shared by every operator.
struct ExecContext {
  /// Worker count; 0 means default_thread_count().
  std::size_t threads = 0;
  /// When set, kernels run their counting variant and add to it.
  MaddCounter* counter = nullptr;
};

/// BTN_THREADS if set to a positive integer, else the hardware concurrency.
std::size_t default_thread_count();

std::size_t resolve_threads(const ExecContext& ctx);

/// Splits [0, n) into at most `threads` contiguous ranges and runs fn on each,
/// joining before return. Ranges are fixed by (n, threads) alone.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t begin, std::size_t end)>& fn);

}  // namespace btn
