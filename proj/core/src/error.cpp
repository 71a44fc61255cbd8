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

#include "btn/error.hpp"

namespace btn {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidShape: return "invalid-shape";
    case Errc::kShapeMismatch: return "shape-mismatch";
    case Errc::kChannelMismatch: return "channel-mismatch";
    case Errc::kInvalidArgument: return "invalid-argument";
    case Errc::kNameMismatch: return "name-mismatch";
    case Errc::kPayloadLength: return "payload-length";
    case Errc::kFormat: return "format";
    case Errc::kIo: return "io";
    case Errc::kNotTopological: return "not-topological";
    case Errc::kGraphTooLarge: return "graph-too-large";
    case Errc::kNonTrivialParallelism: return "non-trivial-parallelism";
    case Errc::kNotInvertible: return "not-invertible";
    case Errc::kInvariant: return "invariant";
  }
  return "unknown";
}

}  // namespace btn
