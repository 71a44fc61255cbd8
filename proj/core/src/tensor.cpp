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

#include "btn/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "btn/error.hpp"

namespace btn {
namespace {

void require_valid(const Shape& shape) {
  if (!shape.valid()) {
    throw Error(Errc::kInvalidShape, "tensor shape " + to_string(shape) +
                                         " has a zero dimension");
  }
}

}  // namespace

std::string to_string(const Shape& shape) {
  return "(" + std::to_string(shape.batch) + "," + std::to_string(shape.height) +
         "," + std::to_string(shape.width) + "," + std::to_string(shape.channels) +
         ")";
}

Tensor::Tensor(const Shape& shape, float fill) : shape_(shape) {
  require_valid(shape);
  data_.assign(shape.numel(), fill);
}

Tensor::Tensor(const Shape& shape, std::vector<float> data)
    : shape_(shape), data_(std::move(data)) {
  require_valid(shape);
  if (data_.size() != shape.numel()) {
    throw Error(Errc::kInvalidShape,
                "tensor data holds " + std::to_string(data_.size()) +
                    " elements but shape " + to_string(shape) + " needs " +
                    std::to_string(shape.numel()));
  }
}

Tensor tensor_new(const Shape& shape, float fill) { return Tensor(shape, fill); }

Tensor tensor_random_gaussian(const Shape& shape, Rng& rng, float mean, float stddev) {
  if (!(stddev >= 0.0f)) {
    throw Error(Errc::kInvalidArgument, "stddev must be non-negative");
  }
  Tensor out(shape);
  fill_gaussian(out.data(), rng, mean, stddev);
  return out;
}

void fill_gaussian(std::span<float> values, Rng& rng, double mean, double stddev) {
  if (!(stddev >= 0.0)) {
    throw Error(Errc::kInvalidArgument, "stddev must be non-negative");
  }
  for (float& v : values) v = static_cast<float>(mean + stddev * rng.gaussian());
}

Tensor slice_channels(const Tensor& input, std::size_t begin, std::size_t end) {
  const Shape& s = input.shape();
  if (begin >= end || end > s.channels) {
    throw Error(Errc::kInvalidArgument, "channel slice [" + std::to_string(begin) + ", " +
                                            std::to_string(end) + ") out of range for " +
                                            to_string(s));
  }
  const std::size_t width = end - begin;
  Tensor out({s.batch, s.height, s.width, width});
  const float* src = input.data().data();
  float* dst = out.data().data();
  const std::size_t pixels = s.batch * s.height * s.width;
  for (std::size_t p = 0; p < pixels; ++p) {
    std::copy(src + p * s.channels + begin, src + p * s.channels + end, dst + p * width);
  }
  return out;
}

double max_abs_rel_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw Error(Errc::kShapeMismatch, "cannot compare " + to_string(a.shape()) +
                                          " with " + to_string(b.shape()));
  }
  double worst = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double x = da[i];
    const double y = db[i];
    const double denom = std::max({std::abs(x), std::abs(y), 1e-12});
    worst = std::max(worst, std::abs(x - y) / denom);
  }
  return worst;
}

}  // namespace btn
