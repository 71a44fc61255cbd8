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
#include <span>
#include <string>
#include <vector>

#include "btn/rng.hpp"

namespace btn {

/// Extents of a rank-4 activation tensor in batch, height, width, channel
/// order. Channels are innermost, so one pixel's channel vector is contiguous.
struct Shape {
  std::size_t batch = 1;
  std::size_t height = 1;
  std::size_t width = 1;
  std::size_t channels = 1;

  std::size_t numel() const noexcept { return batch * height * width * channels; }
  bool valid() const noexcept {
    return batch >= 1 && height >= 1 && width >= 1 && channels >= 1;
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& shape);

/// Dense NHWC float32 tensor. The storage length always equals shape.numel()
/// and every extent is at least one.
class Tensor {
 public:
  explicit Tensor(const Shape& shape, float fill = 0.0f);
  Tensor(const Shape& shape, std::vector<float> data);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  std::size_t index(std::size_t b, std::size_t y, std::size_t x,
                    std::size_t c) const noexcept {
    return ((b * shape_.height + y) * shape_.width + x) * shape_.channels + c;
  }
  float& at(std::size_t b, std::size_t y, std::size_t x, std::size_t c) {
    return data_[index(b, y, x, c)];
  }
  float at(std::size_t b, std::size_t y, std::size_t x, std::size_t c) const {
    return data_[index(b, y, x, c)];
  }

 private:
  Shape shape_;
  std::vector<float> data_;
};

Tensor tensor_new(const Shape& shape, float fill);

/// Overwrites values with mean + stddev * N(0,1), drawn in order from rng.
void fill_gaussian(std::span<float> values, Rng& rng, double mean, double stddev);

/// Elements are mean + stddev * N(0,1) drawn in storage order from rng.
Tensor tensor_random_gaussian(const Shape& shape, Rng& rng, float mean, float stddev);

/// Copy of channels [begin, end) of every pixel.
Tensor slice_channels(const Tensor& input, std::size_t begin, std::size_t end);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, 1e-12).
double max_abs_rel_diff(const Tensor& a, const Tensor& b);

}  // namespace btn
