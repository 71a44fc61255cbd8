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

#include "btn/cost_model.hpp"

namespace btn {
namespace {

ModelSpec spec_of(double alpha, std::size_t res) {
  ModelSpec s;
  s.width_multiplier = alpha;
  s.input_resolution = res;
  return s;
}

TEST(CostModel, DepthwiseSeparableSaving) {
  const double ratio =
      static_cast<double>(madds_standard_conv(56, 56, 64, 64, 3, 1)) /
      static_cast<double>(madds_depthwise_separable(56, 56, 64, 64, 3, 1));
  EXPECT_NEAR(ratio, 9.0 * 64 / 73, 1e-12);
  EXPECT_EQ(madds_depthwise_separable(56, 56, 64, 64, 3, 1),
            madds_depthwise(56, 56, 64, 3, 1) + madds_standard_conv(56, 56, 64, 64, 1, 1));
}

TEST(CostModel, StemAt224) {
  const CostReport r = model_cost(ModelSpec{});
  EXPECT_EQ(r.rows.front().name, "stem");
  EXPECT_EQ(r.rows.front().madds, 10838016u);
}

TEST(CostModel, ReferenceTotals) {
  const CostReport r = model_cost(ModelSpec{});
  EXPECT_EQ(r.total_madds, 300774272u);
  EXPECT_EQ(r.total_params, 3487816u);
  EXPECT_EQ(r.params_with_batchnorm(), 3504872u);
  EXPECT_EQ(r.classifier_madds, 1280000u);
  EXPECT_EQ(r.classifier_params, 1281000u);

  const CostReport wide = model_cost(spec_of(1.4, 224));
  EXPECT_EQ(wide.total_madds, 582195824u);
  EXPECT_EQ(wide.total_params, 6084808u);
}

TEST(CostModel, SmallestConfiguration) {
  EXPECT_EQ(model_cost(spec_of(0.35, 96)).total_madds, 11934128u);
}

TEST(CostModel, RowsSumToTotals) {
  const CostReport r = model_cost(spec_of(0.75, 160));
  std::uint64_t madds = 0, params = 0;
  for (const CostRow& row : r.rows) {
    madds += row.madds;
    params += row.params;
  }
  EXPECT_EQ(madds, r.total_madds);
  EXPECT_EQ(params, r.total_params);
}

TEST(CostModel, MaddsGrowWithAlphaAndResolution) {
  std::uint64_t prev = 0;
  for (double a : {0.35, 0.5, 0.75, 1.0, 1.3, 1.4}) {
    const auto m = model_cost(spec_of(a, 224)).total_madds;
    EXPECT_GT(m, prev);
    prev = m;
  }
  prev = 0;
  for (std::size_t res : {96u, 128u, 160u, 192u, 224u}) {
    const auto m = model_cost(spec_of(1.0, res)).total_madds;
    EXPECT_GT(m, prev);
    prev = m;
  }
}

TEST(CostModel, InstrumentedCountEqualsFormula) {
  const ModelSpec spec = spec_of(0.35, 96);
  const Model m = build_model(spec, WeightInit::kRandom, 1);
  const Tensor in = tensor_new({1, 96, 96, 3}, 0.25f);
  const std::uint64_t formula = model_cost(spec).total_madds;
  EXPECT_EQ(instrumented_count(m, in), formula);
  EXPECT_EQ(instrumented_count(m, in, 4), formula);
}

}  // namespace
}  // namespace btn
