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

#include "btn/tensor_io.hpp"

#include <bit>
#include <fstream>
#include <limits>

#include "binary_io.hpp"
#include "btn/error.hpp"

namespace btn {

using detail::read_le;
using detail::write_le;

void write_tensor(std::ostream& out, const Tensor& tensor) {
  const Shape& s = tensor.shape();
  for (std::size_t d : {s.batch, s.height, s.width, s.channels}) {
    if (d > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(Errc::kInvalidShape, "dimension does not fit the u32 header field");
    }
  }
  detail::write_magic(out, "BTEN");
  write_le<std::uint16_t>(out, kTensorFormatVersion);
  write_le<std::uint16_t>(out, 4);
  for (std::size_t d : {s.batch, s.height, s.width, s.channels}) {
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  }
  detail::write_floats(out, tensor.data());
  if (!out) throw Error(Errc::kIo, "failed writing tensor");
}

Tensor read_tensor(std::istream& in) {
  detail::expect_magic(in, "BTEN");
  const auto version = read_le<std::uint16_t>(in, "tensor version");
  if (version != kTensorFormatVersion) {
    throw Error(Errc::kFormat, "unsupported tensor version " + std::to_string(version));
  }
  const auto rank = read_le<std::uint16_t>(in, "tensor rank");
  if (rank != 4) {
    throw Error(Errc::kFormat, "tensor rank must be 4, got " + std::to_string(rank));
  }
  Shape shape;
  shape.batch = read_le<std::uint32_t>(in, "tensor dims");
  shape.height = read_le<std::uint32_t>(in, "tensor dims");
  shape.width = read_le<std::uint32_t>(in, "tensor dims");
  shape.channels = read_le<std::uint32_t>(in, "tensor dims");
  if (!shape.valid()) {
    throw Error(Errc::kFormat, "tensor header has a zero dimension");
  }
  std::vector<float> data(shape.numel());
  for (float& v : data) {
    v = std::bit_cast<float>(read_le<std::uint32_t>(in, "tensor payload"));
  }
  return Tensor(shape, std::move(data));
}

void save_tensor(const std::filesystem::path& path, const Tensor& tensor) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIo, "cannot open " + path.string() + " for writing");
  write_tensor(out, tensor);
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  return read_tensor(in);
}

}  // namespace btn
