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
#include "btn/error.hpp"
#include "oracles/fixtures.hpp"
#include "oracles/oracles.hpp"

namespace btn {
namespace {

TEST(Bottleneck, ExpandedWidth) {
  EXPECT_EQ(expanded_width(64, 6.0), 384u);
  EXPECT_EQ(expanded_width(32, 1.0), 32u);
  EXPECT_THROW(expanded_width(8, 0.5), Error);
}

TEST(Bottleneck, ShortcutOnlyWhenShapeIsKept) {
  EXPECT_TRUE(make_bottleneck({64, 64, 6.0, 1}).residual);
  EXPECT_FALSE(make_bottleneck({64, 96, 6.0, 1}).residual);
  EXPECT_FALSE(make_bottleneck({64, 64, 6.0, 2}).residual);
  BottleneckConfig forced{64, 96, 6.0, 1};
  forced.shortcut = true;
  EXPECT_THROW(make_bottleneck(forced), Error);
  BottleneckConfig refused{64, 64, 6.0, 1};
  refused.shortcut = false;
  EXPECT_THROW(make_bottleneck(refused), Error);
}

TEST(Bottleneck, UnitExpansionSkipsExpandConv) {
  EXPECT_FALSE(make_bottleneck({32, 16, 1.0, 1}).expand.has_value());
  BottleneckConfig unfused{32, 16, 1.0, 1};
  unfused.fuse_t1_expand = false;
  EXPECT_TRUE(make_bottleneck(unfused).expand.has_value());
}

TEST(Bottleneck, ForwardMatchesOracle) {
  Rng rng(20);
  for (auto config : {BottleneckConfig{16, 16, 6.0, 1}, BottleneckConfig{16, 24, 6.0, 2},
                      BottleneckConfig{8, 8, 1.0, 1}}) {
    const BottleneckParams p = testing::random_bottleneck(rng, config);
    const Tensor in = tensor_random_gaussian({1, 9, 9, config.in_channels}, rng, 0.0f, 1.0f);
    EXPECT_LE(max_abs_rel_diff(bottleneck_forward(in, p), oracle::bottleneck(in, p)), 1e-5);
  }
}

TEST(Bottleneck, ObserverSeesBothActivations) {
  Rng rng(21);
  const BottleneckParams p = testing::random_bottleneck(rng, {8, 8, 6.0, 1});
  std::vector<std::string> stages;
  bottleneck_forward(tensor_new({1, 4, 4, 8}, 1.0f), p, {},
                     [&](std::string_view s, const Tensor& t) {
                       stages.emplace_back(s);
                       EXPECT_EQ(t.shape().channels, 48u);
                     });
  EXPECT_EQ(stages, (std::vector<std::string>{"expand", "depthwise"}));
}

TEST(Bottleneck, InputChannelMismatch) {
  const BottleneckParams p = make_bottleneck({8, 8, 6.0, 1});
  try {
    bottleneck_forward(tensor_new({1, 4, 4, 9}, 0.0f), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kChannelMismatch);
  }
}

TEST(BottleneckMadds, ClosedFormStride1) {
  // h * w * k * t * (k + 9 + k')
  EXPECT_EQ(bottleneck_madds({14, 14, 64, 128, 6.0, 3, 1}), 15128064u);
  EXPECT_EQ(bottleneck_madds({14, 14, 64, 128, 6.0, 3, 1}), 14u * 14 * 64 * 6 * (64 + 9 + 128));
}

TEST(BottleneckMadds, Stride2ChargesOutputResolution) {
  EXPECT_EQ(bottleneck_madds({28, 28, 32, 64, 6.0, 3, 2}), 7564032u);
}

TEST(BottleneckMadds, InstrumentedEqualsFormula) {
  Rng rng(22);
  const BottleneckParams p = testing::random_bottleneck(rng, {16, 24, 6.0, 2});
  MaddCounter counter;
  bottleneck_forward(tensor_random_gaussian({1, 11, 11, 16}, rng, 0.0f, 1.0f), p, {0, &counter});
  EXPECT_EQ(counter.madds, bottleneck_madds({11, 11, 16, 24, 6.0, 3, 2}));
}

}  // namespace
}  // namespace btn
