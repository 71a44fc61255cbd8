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

#include <gtest/gtest.h>

#include "btn/blocks.hpp"
#include "oracles/fixtures.hpp"
#include "oracles/oracles.hpp"

namespace btn {
namespace {

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.next_u64() % (hi - lo + 1));
}

TEST(KernelOracle, RandomConvolutions) {
  Rng rng(1001);
  for (int i = 0; i < 60; ++i) {
    const std::size_t k = rng.next_u64() % 2 ? 3 : 1;
    const std::size_t s = pick(rng, 1, 2);
    const Shape shape{pick(rng, 1, 2), pick(rng, 1, 12), pick(rng, 1, 12), pick(rng, 1, 9)};
    const Conv2dParams p =
        testing::random_conv(rng, k, s, shape.channels, pick(rng, 1, 9), rng.next_u64() % 2);
    const Tensor in = tensor_random_gaussian(shape, rng, 0.0f, 1.0f);
    MaddCounter counter;
    const Tensor got = conv2d(in, p, {pick(rng, 1, 4), &counter});
    ASSERT_LE(max_abs_rel_diff(got, oracle::conv2d(in, p)), 1e-5)
        << "case " << i << " " << to_string(shape) << " k" << k << " s" << s;
    ASSERT_LE(oracle::scaled_diff(got, oracle::conv2d_exact(in, p)), 1e-5) << "case " << i;
    ASSERT_EQ(counter.madds, oracle::conv2d_madds(shape, p));
  }
}

TEST(KernelOracle, RandomDepthwise) {
  Rng rng(1002);
  for (int i = 0; i < 40; ++i) {
    const Shape shape{pick(rng, 1, 2), pick(rng, 1, 13), pick(rng, 1, 13), pick(rng, 1, 20)};
    const DepthwiseParams p = testing::random_depthwise(rng, pick(rng, 1, 2), shape.channels);
    const Tensor in = tensor_random_gaussian(shape, rng, 0.0f, 1.0f);
    MaddCounter counter;
    const Tensor got = depthwise_conv(in, p, {pick(rng, 1, 4), &counter});
    ASSERT_LE(max_abs_rel_diff(got, oracle::depthwise(in, p)), 1e-5) << "case " << i;
    ASSERT_LE(oracle::scaled_diff(got, oracle::depthwise_exact(in, p)), 1e-5) << "case " << i;
    ASSERT_EQ(counter.madds, oracle::depthwise_madds(shape, p));
  }
}

TEST(KernelOracle, RandomBlocks) {
  Rng rng(1003);
  for (int i = 0; i < 30; ++i) {
    BottleneckConfig config;
    config.in_channels = pick(rng, 1, 12);
    config.stride = pick(rng, 1, 2);
    config.out_channels = rng.next_u64() % 2 ? config.in_channels : pick(rng, 1, 12);
    config.expansion = static_cast<double>(pick(rng, 1, 6));
    const BottleneckParams p = testing::random_bottleneck(rng, config);
    const Shape shape{1, pick(rng, 2, 10), pick(rng, 2, 10), config.in_channels};
    const Tensor in = tensor_random_gaussian(shape, rng, 0.0f, 1.0f);
    MaddCounter counter;
    const Tensor got = bottleneck_forward(in, p, {0, &counter});
    ASSERT_LE(max_abs_rel_diff(got, oracle::bottleneck(in, p)), 1e-5) << "case " << i;
    ASSERT_LE(oracle::scaled_diff(got, oracle::bottleneck_exact(in, p)), 1e-5) << "case " << i;
    ASSERT_EQ(counter.madds,
              bottleneck_madds({shape.height, shape.width, config.in_channels,
                                config.out_channels, config.expansion, 3, config.stride,
                                p.expand.has_value()}));
  }
}

}  // namespace
}  // namespace btn
