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
#include <string>
#include <vector>

#include "btn/architecture.hpp"

namespace btn {

struct ManifestEntry {
  std::string name;
  std::vector<std::uint32_t> dims;

  std::uint64_t numel() const;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Folded (inference-only) network weights. On disk, little-endian:
///
///   char[4] "BWGT"
///   u32     entry count
///   entry*  u16 name length, name bytes, u8 rank, rank x u32 dims
///   f32*    payload, entries concatenated in manifest order
struct WeightContainer {
  std::vector<ManifestEntry> manifest;
  std::vector<float> payload;

  std::uint64_t expected_payload() const;
};

void write_weight_container(std::ostream& out, const WeightContainer& container);
/// Parses the manifest and reads every remaining float. The payload length is
/// not checked here; load_weights reports a mismatch as Errc::kPayloadLength.
WeightContainer read_weight_container(std::istream& in);

void save_weight_file(const std::filesystem::path& path, const WeightContainer& container);
WeightContainer load_weight_file(const std::filesystem::path& path);

WeightContainer save_weights(const Model& model);

/// Returns a copy of `model` carrying the container's values. Validation runs
/// to completion before anything is copied, in this order: entry names
/// (Errc::kNameMismatch), shapes (Errc::kShapeMismatch), payload length
/// (Errc::kPayloadLength).
Model load_weights(const Model& model, const WeightContainer& container);

}  // namespace btn
