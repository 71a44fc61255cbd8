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

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "btn/tensor.hpp"

namespace btn {

/// Tensor file layout, all fields little-endian:
///
///   offset 0   char[4]  "BTEN"
///   offset 4   u16      version (1)
///   offset 6   u16      rank (always 4)
///   offset 8   u32[4]   batch, height, width, channels
///   offset 24  f32[...] payload in NHWC order
inline constexpr std::uint16_t kTensorFormatVersion = 1;
inline constexpr std::size_t kTensorHeaderBytes = 24;

void write_tensor(std::ostream& out, const Tensor& tensor);
Tensor read_tensor(std::istream& in);

void save_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor load_tensor(const std::filesystem::path& path);

}  // namespace btn
