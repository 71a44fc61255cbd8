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

#include "btn/weights.hpp"

#include <bit>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include "binary_io.hpp"
#include "btn/error.hpp"

namespace btn {

using detail::read_le;
using detail::write_le;

namespace {

std::string dims_string(const std::vector<std::uint32_t>& dims) {
  std::string out = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(dims[i]);
  }
  return out + "]";
}

}  // namespace

std::uint64_t ManifestEntry::numel() const {
  std::uint64_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  return n;
}

std::uint64_t WeightContainer::expected_payload() const {
  std::uint64_t total = 0;
  for (const auto& e : manifest) total += e.numel();
  return total;
}

void write_weight_container(std::ostream& out, const WeightContainer& container) {
  std::unordered_set<std::string> seen;
  for (const auto& e : container.manifest) {
    if (!seen.insert(e.name).second) {
      throw Error(Errc::kNameMismatch, "duplicate tensor name '" + e.name + "'");
    }
    if (e.name.size() > std::numeric_limits<std::uint16_t>::max() ||
        e.dims.size() > std::numeric_limits<std::uint8_t>::max()) {
      throw Error(Errc::kFormat, "manifest entry '" + e.name + "' does not fit the format");
    }
  }
  if (container.payload.size() != container.expected_payload()) {
    throw Error(Errc::kPayloadLength, "payload holds " + std::to_string(container.payload.size()) +
                                          " floats, manifest needs " +
                                          std::to_string(container.expected_payload()));
  }
  detail::write_magic(out, "BWGT");
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(container.manifest.size()));
  for (const auto& e : container.manifest) {
    write_le<std::uint16_t>(out, static_cast<std::uint16_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    write_le<std::uint8_t>(out, static_cast<std::uint8_t>(e.dims.size()));
    for (std::uint32_t d : e.dims) write_le<std::uint32_t>(out, d);
  }
  detail::write_floats(out, container.payload);
  if (!out) throw Error(Errc::kIo, "failed writing weight container");
}

WeightContainer read_weight_container(std::istream& in) {
  detail::expect_magic(in, "BWGT");
  WeightContainer container;
  const auto count = read_le<std::uint32_t>(in, "manifest count");
  std::unordered_set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    ManifestEntry e;
    const auto len = read_le<std::uint16_t>(in, "name length");
    e.name.resize(len);
    in.read(e.name.data(), len);
    if (in.gcount() != len) throw Error(Errc::kFormat, "truncated tensor name");
    if (!seen.insert(e.name).second) {
      throw Error(Errc::kNameMismatch, "duplicate tensor name '" + e.name + "'");
    }
    const auto rank = read_le<std::uint8_t>(in, "rank");
    for (std::uint8_t r = 0; r < rank; ++r) e.dims.push_back(read_le<std::uint32_t>(in, "dims"));
    container.manifest.push_back(std::move(e));
  }
  std::array<unsigned char, 4> bytes{};
  while (true) {
    in.read(reinterpret_cast<char*>(bytes.data()), 4);
    const auto got = in.gcount();
    if (got == 0) break;
    if (got != 4) {
      throw Error(Errc::kPayloadLength, "payload ends with a partial float");
    }
    const std::uint32_t bits = std::uint32_t{bytes[0]} | (std::uint32_t{bytes[1]} << 8) |
                               (std::uint32_t{bytes[2]} << 16) | (std::uint32_t{bytes[3]} << 24);
    container.payload.push_back(std::bit_cast<float>(bits));
  }
  return container;
}

void save_weight_file(const std::filesystem::path& path, const WeightContainer& container) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot open " + path.string() + " for writing");
  write_weight_container(out, container);
}

WeightContainer load_weight_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  return read_weight_container(in);
}

WeightContainer save_weights(const Model& model) {
  WeightContainer container;
  for (const auto& p : parameters(model)) {
    container.manifest.push_back({p.info.name, p.info.dims});
    container.payload.insert(container.payload.end(), p.values->begin(), p.values->end());
  }
  return container;
}

Model load_weights(const Model& model, const WeightContainer& container) {
  const std::vector<ParameterInfo> schema = parameter_schema(model);
  const auto& manifest = container.manifest;
  for (std::size_t i = 0; i < std::max(schema.size(), manifest.size()); ++i) {
    if (i >= manifest.size()) {
      throw Error(Errc::kNameMismatch, "container is missing tensor '" + schema[i].name + "'");
    }
    if (i >= schema.size()) {
      throw Error(Errc::kNameMismatch, "container has unexpected tensor '" + manifest[i].name + "'");
    }
    if (manifest[i].name != schema[i].name) {
      throw Error(Errc::kNameMismatch, "entry " + std::to_string(i) + " is '" + manifest[i].name +
                                           "', model expects '" + schema[i].name + "'");
    }
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (manifest[i].dims != schema[i].dims) {
      throw Error(Errc::kShapeMismatch, "tensor '" + schema[i].name + "' has shape " +
                                            dims_string(manifest[i].dims) + ", model expects " +
                                            dims_string(schema[i].dims));
    }
  }
  if (container.payload.size() != container.expected_payload()) {
    throw Error(Errc::kPayloadLength, "payload holds " + std::to_string(container.payload.size()) +
                                          " floats, manifest needs " +
                                          std::to_string(container.expected_payload()));
  }

  Model loaded = model;
  std::size_t offset = 0;
  for (auto& p : parameters(loaded)) {
    const std::size_t n = p.values->size();
    std::copy(container.payload.begin() + static_cast<std::ptrdiff_t>(offset),
              container.payload.begin() + static_cast<std::ptrdiff_t>(offset + n),
              p.values->begin());
    offset += n;
  }
  return loaded;
}

}  // namespace btn
