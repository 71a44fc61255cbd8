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

#include "btn/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <string>

#include "btn/error.hpp"

namespace btn {
namespace {

// Smallest output-channel slice handed to one worker; keeps inner loops long
// enough to vectorize.
constexpr std::size_t kMinChannelsPerTask = 16;

std::string dims(std::size_t a, std::size_t b) {
  return std::to_string(a) + " vs " + std::to_string(b);
}

void require_kernel_stride(std::size_t kernel, std::size_t stride, const char* op) {
  if (kernel != 1 && kernel != 3) {
    throw Error(Errc::kInvalidArgument,
                std::string(op) + ": kernel must be 1 or 3, got " + std::to_string(kernel));
  }
  if (stride != 1 && stride != 2) {
    throw Error(Errc::kInvalidArgument,
                std::string(op) + ": stride must be 1 or 2, got " + std::to_string(stride));
  }
}

// Read-only NHWC window over either the caller's tensor or a zero-padded copy.
struct PaddedView {
  std::vector<float> storage;
  const float* data = nullptr;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  const float* pixel(std::size_t b, std::size_t y, std::size_t x) const {
    return data + ((b * height + y) * width + x) * channels;
  }
};

// Builds a view in which output pixel (oy, ox) reads rows oy*s .. oy*s+k-1 and
// columns ox*s .. ox*s+k-1 without bounds checks.
PaddedView make_padded_view(const Tensor& input, std::size_t kernel, std::size_t stride) {
  const Shape& s = input.shape();
  const SamePadding ph = same_padding(s.height, kernel, stride);
  const SamePadding pw = same_padding(s.width, kernel, stride);
  PaddedView view;
  view.channels = s.channels;
  if (ph.before == 0 && ph.after == 0 && pw.before == 0 && pw.after == 0) {
    view.data = input.data().data();
    view.height = s.height;
    view.width = s.width;
    return view;
  }
  view.height = s.height + ph.before + ph.after;
  view.width = s.width + pw.before + pw.after;
  view.storage.assign(s.batch * view.height * view.width * s.channels, 0.0f);
  const float* src = input.data().data();
  for (std::size_t b = 0; b < s.batch; ++b) {
    for (std::size_t y = 0; y < s.height; ++y) {
      const float* row = src + input.index(b, y, 0, 0);
      float* dst = view.storage.data() +
                   ((b * view.height + y + ph.before) * view.width + pw.before) * s.channels;
      std::copy(row, row + s.width * s.channels, dst);
    }
  }
  view.data = view.storage.data();
  return view;
}

std::size_t task_count(std::size_t channels, const ExecContext& ctx) {
  const std::size_t by_width = (channels + kMinChannelsPerTask - 1) / kMinChannelsPerTask;
  return std::max<std::size_t>(1, std::min(resolve_threads(ctx), by_width));
}

template <bool Counting>
void conv2d_accumulate_impl(const PaddedView& view, const Conv2dParams& p, Tensor& out,
                            const ExecContext& ctx) {
  const Shape os = out.shape();
  const std::size_t k = p.kernel;
  const std::size_t s = p.stride;
  const std::size_t din = p.in_channels;
  const std::size_t dout = p.out_channels;
  const float* w = p.weights.data();
  float* dst = out.data().data();
  std::atomic<std::uint64_t> total{0};

  const std::size_t tasks = task_count(dout, ctx);
  const std::size_t per_task = (dout + tasks - 1) / tasks;
  parallel_for(tasks, tasks, [&](std::size_t t_begin, std::size_t t_end) {
    std::vector<float> acc;
    for (std::size_t t = t_begin; t < t_end; ++t) {
      const std::size_t c0 = t * per_task;
      const std::size_t c1 = std::min(dout, c0 + per_task);
      if (c0 >= c1) continue;
      const std::size_t len = c1 - c0;
      acc.resize(len);
      std::uint64_t local = 0;
      for (std::size_t b = 0; b < os.batch; ++b) {
        for (std::size_t oy = 0; oy < os.height; ++oy) {
          for (std::size_t ox = 0; ox < os.width; ++ox) {
            float* o = dst + out.index(b, oy, ox, c0);
            std::copy(o, o + len, acc.begin());
            for (std::size_t ky = 0; ky < k; ++ky) {
              for (std::size_t kx = 0; kx < k; ++kx) {
                const float* px = view.pixel(b, oy * s + ky, ox * s + kx);
                const float* wk = w + (ky * k + kx) * din * dout + c0;
                for (std::size_t ci = 0; ci < din; ++ci) {
                  const float a = px[ci];
                  const float* wr = wk + ci * dout;
                  for (std::size_t j = 0; j < len; ++j) acc[j] += a * wr[j];
                  if constexpr (Counting) local += len;
                }
              }
            }
            std::copy(acc.begin(), acc.end(), o);
          }
        }
      }
      if constexpr (Counting) total += local;
    }
  });
  if constexpr (Counting) ctx.counter->madds += total.load();
}

template <bool Counting>
void depthwise_impl(const PaddedView& view, const DepthwiseParams& p, Tensor& out,
                    const ExecContext& ctx) {
  const Shape os = out.shape();
  const std::size_t k = p.kernel;
  const std::size_t s = p.stride;
  const std::size_t d = p.channels;
  const float* w = p.weights.data();
  const bool has_bias = !p.bias.empty();
  float* dst = out.data().data();
  std::atomic<std::uint64_t> total{0};

  const std::size_t tasks = task_count(d, ctx);
  const std::size_t per_task = (d + tasks - 1) / tasks;
  parallel_for(tasks, tasks, [&](std::size_t t_begin, std::size_t t_end) {
    std::vector<float> acc;
    for (std::size_t t = t_begin; t < t_end; ++t) {
      const std::size_t c0 = t * per_task;
      const std::size_t c1 = std::min(d, c0 + per_task);
      if (c0 >= c1) continue;
      const std::size_t len = c1 - c0;
      acc.resize(len);
      std::uint64_t local = 0;
      for (std::size_t b = 0; b < os.batch; ++b) {
        for (std::size_t oy = 0; oy < os.height; ++oy) {
          for (std::size_t ox = 0; ox < os.width; ++ox) {
            std::fill(acc.begin(), acc.end(), 0.0f);
            for (std::size_t ky = 0; ky < k; ++ky) {
              for (std::size_t kx = 0; kx < k; ++kx) {
                const float* px = view.pixel(b, oy * s + ky, ox * s + kx) + c0;
                const float* wk = w + (ky * k + kx) * d + c0;
                for (std::size_t j = 0; j < len; ++j) acc[j] += px[j] * wk[j];
                if constexpr (Counting) local += len;
              }
            }
            float* o = dst + out.index(b, oy, ox, c0);
            if (has_bias) {
              for (std::size_t j = 0; j < len; ++j) o[j] = acc[j] + p.bias[c0 + j];
            } else {
              std::copy(acc.begin(), acc.end(), o);
            }
          }
        }
      }
      if constexpr (Counting) total += local;
    }
  });
  if constexpr (Counting) ctx.counter->madds += total.load();
}

template <typename Fn>
Tensor map_elements(const Tensor& input, Fn fn) {
  Tensor out(input.shape());
  const auto src = input.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = fn(src[i]);
  return out;
}

}  // namespace

std::size_t same_output_extent(std::size_t in, std::size_t stride) {
  return (in + stride - 1) / stride;
}

SamePadding same_padding(std::size_t in, std::size_t kernel, std::size_t stride) {
  const std::size_t out = same_output_extent(in, stride);
  const std::size_t needed = (out - 1) * stride + kernel;
  const std::size_t total = needed > in ? needed - in : 0;
  return {total / 2, total - total / 2};
}

Conv2dParams Conv2dParams::zeros(std::size_t kernel, std::size_t stride,
                                 std::size_t in_channels, std::size_t out_channels) {
  Conv2dParams p;
  p.kernel = kernel;
  p.stride = stride;
  p.in_channels = in_channels;
  p.out_channels = out_channels;
  p.weights.assign(kernel * kernel * in_channels * out_channels, 0.0f);
  p.bias.assign(out_channels, 0.0f);
  return p;
}

void Conv2dParams::validate() const {
  require_kernel_stride(kernel, stride, "conv2d");
  if (in_channels == 0 || out_channels == 0) {
    throw Error(Errc::kInvalidArgument, "conv2d: channel counts must be positive");
  }
  if (weights.size() != kernel * kernel * in_channels * out_channels) {
    throw Error(Errc::kInvalidArgument,
                "conv2d: weight array holds " + std::to_string(weights.size()) +
                    " values, expected k*k*in*out = " +
                    std::to_string(kernel * kernel * in_channels * out_channels));
  }
  if (!bias.empty() && bias.size() != out_channels) {
    throw Error(Errc::kInvalidArgument, "conv2d: bias length " + dims(bias.size(), out_channels));
  }
}

Conv2dParams Conv2dParams::slice_outputs(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > out_channels) {
    throw Error(Errc::kInvalidArgument, "conv2d: bad output slice");
  }
  Conv2dParams p = zeros(kernel, stride, in_channels, end - begin);
  for (std::size_t tap = 0; tap < kernel * kernel; ++tap) {
    for (std::size_t ci = 0; ci < in_channels; ++ci) {
      const float* src = weights.data() + (tap * in_channels + ci) * out_channels + begin;
      std::copy(src, src + (end - begin),
                p.weights.begin() + (tap * in_channels + ci) * (end - begin));
    }
  }
  if (bias.empty()) {
    p.bias.clear();
  } else {
    p.bias.assign(bias.begin() + begin, bias.begin() + end);
  }
  return p;
}

Conv2dParams Conv2dParams::slice_inputs(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > in_channels) {
    throw Error(Errc::kInvalidArgument, "conv2d: bad input slice");
  }
  Conv2dParams p = zeros(kernel, stride, end - begin, out_channels);
  p.bias.clear();
  for (std::size_t tap = 0; tap < kernel * kernel; ++tap) {
    const float* src = weights.data() + (tap * in_channels + begin) * out_channels;
    std::copy(src, src + (end - begin) * out_channels,
              p.weights.begin() + tap * (end - begin) * out_channels);
  }
  return p;
}

DepthwiseParams DepthwiseParams::zeros(std::size_t kernel, std::size_t stride,
                                       std::size_t channels) {
  DepthwiseParams p;
  p.kernel = kernel;
  p.stride = stride;
  p.channels = channels;
  p.weights.assign(kernel * kernel * channels, 0.0f);
  p.bias.assign(channels, 0.0f);
  return p;
}

void DepthwiseParams::validate() const {
  require_kernel_stride(kernel, stride, "depthwise_conv");
  if (channels == 0) {
    throw Error(Errc::kInvalidArgument, "depthwise_conv: channel count must be positive");
  }
  if (weights.size() != kernel * kernel * channels) {
    throw Error(Errc::kInvalidArgument, "depthwise_conv: weight array holds " +
                                            std::to_string(weights.size()) +
                                            " values, expected k*k*d");
  }
  if (!bias.empty() && bias.size() != channels) {
    throw Error(Errc::kInvalidArgument,
                "depthwise_conv: bias length " + dims(bias.size(), channels));
  }
}

DepthwiseParams DepthwiseParams::slice_channels(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > channels) {
    throw Error(Errc::kInvalidArgument, "depthwise_conv: bad channel slice");
  }
  DepthwiseParams p = zeros(kernel, stride, end - begin);
  for (std::size_t tap = 0; tap < kernel * kernel; ++tap) {
    const float* src = weights.data() + tap * channels + begin;
    std::copy(src, src + (end - begin), p.weights.begin() + tap * (end - begin));
  }
  if (bias.empty()) {
    p.bias.clear();
  } else {
    p.bias.assign(bias.begin() + begin, bias.begin() + end);
  }
  return p;
}

Shape conv2d_output_shape(const Shape& input, const Conv2dParams& p) {
  return {input.batch, same_output_extent(input.height, p.stride),
          same_output_extent(input.width, p.stride), p.out_channels};
}

void conv2d_accumulate(const Tensor& input, const Conv2dParams& p, Tensor& out,
                       const ExecContext& ctx) {
  p.validate();
  if (input.shape().channels != p.in_channels) {
    throw Error(Errc::kChannelMismatch,
                "conv2d: input has " + dims(input.shape().channels, p.in_channels) +
                    " expected channels");
  }
  const Shape expected = conv2d_output_shape(input.shape(), p);
  if (out.shape() != expected) {
    throw Error(Errc::kShapeMismatch, "conv2d: accumulator shape " + to_string(out.shape()) +
                                          " vs " + to_string(expected));
  }
  const PaddedView view = make_padded_view(input, p.kernel, p.stride);
  if (ctx.counter != nullptr) {
    conv2d_accumulate_impl<true>(view, p, out, ctx);
  } else {
    conv2d_accumulate_impl<false>(view, p, out, ctx);
  }
}

Tensor conv2d(const Tensor& input, const Conv2dParams& p, const ExecContext& ctx) {
  p.validate();
  if (input.shape().channels != p.in_channels) {
    throw Error(Errc::kChannelMismatch,
                "conv2d: input has " + dims(input.shape().channels, p.in_channels) +
                    " expected channels");
  }
  Tensor out(conv2d_output_shape(input.shape(), p), 0.0f);
  conv2d_accumulate(input, p, out, ctx);
  if (!p.bias.empty()) add_bias_inplace(out, p.bias);
  return out;
}

Tensor depthwise_conv(const Tensor& input, const DepthwiseParams& p, const ExecContext& ctx) {
  p.validate();
  const Shape& is = input.shape();
  if (is.channels != p.channels) {
    throw Error(Errc::kChannelMismatch,
                "depthwise_conv: input has " + dims(is.channels, p.channels) +
                    " expected channels");
  }
  Tensor out({is.batch, same_output_extent(is.height, p.stride),
              same_output_extent(is.width, p.stride), p.channels});
  const PaddedView view = make_padded_view(input, p.kernel, p.stride);
  if (ctx.counter != nullptr) {
    depthwise_impl<true>(view, p, out, ctx);
  } else {
    depthwise_impl<false>(view, p, out, ctx);
  }
  return out;
}

Tensor relu6(const Tensor& input) {
  return map_elements(input, [](float x) { return std::min(std::max(x, 0.0f), 6.0f); });
}

Tensor relu(const Tensor& input) {
  return map_elements(input, [](float x) { return std::max(x, 0.0f); });
}

Tensor global_avgpool(const Tensor& input) {
  const Shape& s = input.shape();
  Tensor out({s.batch, 1, 1, s.channels});
  std::vector<double> sums(s.channels);
  const double count = static_cast<double>(s.height * s.width);
  for (std::size_t b = 0; b < s.batch; ++b) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t y = 0; y < s.height; ++y) {
      for (std::size_t x = 0; x < s.width; ++x) {
        const float* px = input.data().data() + input.index(b, y, x, 0);
        for (std::size_t c = 0; c < s.channels; ++c) sums[c] += px[c];
      }
    }
    for (std::size_t c = 0; c < s.channels; ++c) {
      out.at(b, 0, 0, c) = static_cast<float>(sums[c] / count);
    }
  }
  return out;
}

Tensor add_residual(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw Error(Errc::kShapeMismatch, "add_residual: " + to_string(a.shape()) + " vs " +
                                          to_string(b.shape()));
  }
  Tensor out(a.shape());
  const auto x = a.data();
  const auto y = b.data();
  auto z = out.data();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] + y[i];
  return out;
}

void add_bias_inplace(Tensor& t, const std::vector<float>& bias) {
  const std::size_t c = t.shape().channels;
  if (bias.size() != c) {
    throw Error(Errc::kShapeMismatch, "bias length " + dims(bias.size(), c));
  }
  auto data = t.data();
  for (std::size_t i = 0; i < data.size(); i += c) {
    for (std::size_t j = 0; j < c; ++j) data[i + j] += bias[j];
  }
}

}  // namespace btn
