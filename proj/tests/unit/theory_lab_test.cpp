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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "btn/error.hpp"
#include "btn/theory_lab.hpp"

namespace btn {
namespace {

Eigen::MatrixXd signed_axes() {
  Eigen::MatrixXd b(4, 2);
  b << 1, 0, 0, 1, -1, 0, 0, -1;
  return b;
}

TEST(InteriorIdentity, PositivePointsPassThrough) {
  Rng rng(11);
  EXPECT_TRUE(relu_interior_identity_check(positive_points(100000, 3, rng)));
  Eigen::MatrixXd bad(1, 2);
  bad << 1.0, -0.5;
  EXPECT_THROW(relu_interior_identity_check(bad), Error);
}

TEST(Invertibility, HandConstructedCases) {
  const Eigen::MatrixXd b = signed_axes();
  const Eigen::VectorXd y_pos = relu(b * Eigen::Vector2d(1, 1));
  EXPECT_EQ(active_rows(y_pos), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(invertibility_condition(b, y_pos));
  const Eigen::VectorXd y_neg = relu(b * Eigen::Vector2d(-1, -1));
  EXPECT_EQ(active_rows(y_neg), (std::vector<std::size_t>{2, 3}));
  EXPECT_TRUE(invertibility_condition(b, y_neg));
  EXPECT_TRUE(recover_input(b, y_neg).isApprox(Eigen::Vector2d(-1, -1)));
}

TEST(Invertibility, TooFewActiveRows) {
  const Eigen::MatrixXd b = Eigen::Matrix3d::Identity();
  const Eigen::VectorXd y = relu(b * Eigen::Vector3d(1, -1, 2));
  EXPECT_FALSE(invertibility_condition(b, y));
  try {
    recover_input(b, y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNotInvertible);
  }
  EXPECT_THROW(recover_input(b, Eigen::VectorXd::Zero(3)), Error);
}

TEST(Invertibility, RankDeficientActiveRows) {
  Eigen::MatrixXd b(3, 2);
  b << 1, 1, 2, 2, 3, 3;
  EXPECT_FALSE(invertibility_condition(b, relu(b * Eigen::Vector2d(1, 1))));
}

TEST(Invertibility, DimensionMismatch) {
  try {
    invertibility_condition(signed_axes(), Eigen::VectorXd::Ones(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kShapeMismatch);
  }
}

TEST(Invertibility, GaussianRecoveryRoundTrip) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd b = gaussian_matrix(24, 4, rng);
    const Eigen::VectorXd x0 = gaussian_matrix(4, 1, rng);
    const Eigen::VectorXd y0 = relu(b * x0);
    ASSERT_TRUE(invertibility_condition(b, y0));
    const Eigen::VectorXd x = recover_input(b, y0);
    EXPECT_LT((x - x0).norm() / x0.norm(), 1e-6);
    EXPECT_LT((relu(b * x) - y0).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Collapse, ExactFractions) {
  EXPECT_DOUBLE_EQ(preserved_fraction_exact(2, 4), 0.6875);
  EXPECT_DOUBLE_EQ(preserved_fraction_exact(3, 3), 0.125);
  EXPECT_NEAR(preserved_fraction_exact(4, 24), 0.99986142, 1e-8);
  EXPECT_GE(preserved_fraction_exact(4, 24), collapse_bound(24));
  EXPECT_DOUBLE_EQ(collapse_bound(24), 1.0 - std::pow(2.0, -12));
  EXPECT_THROW(preserved_fraction_exact(3, 2), Error);
}

TEST(Collapse, MonteCarloWithinFourStandardErrors) {
  for (auto [n, m] : {std::pair{2u, 4u}, std::pair{3u, 3u}, std::pair{1u, 5u}, std::pair{3u, 8u}}) {
    const CollapseResult r = collapse_fraction_mc(n, m, 20000, 100 + n + m);
    EXPECT_LE(std::abs(r.fraction - r.expected), 4 * r.standard_error + 1e-12)
        << n << "x" << m;
  }
}

TEST(Collapse, DeterministicAcrossThreadCounts) {
  const auto a = collapse_fraction_mc(2, 4, 5000, 3, {1});
  const auto b = collapse_fraction_mc(2, 4, 5000, 3, {4});
  EXPECT_EQ(a.preserved, b.preserved);
}

TEST(Collapse, RejectsBadArguments) {
  EXPECT_THROW(collapse_fraction_mc(3, 2, 10, 0), Error);
  EXPECT_THROW(collapse_fraction_mc(0, 2, 10, 0), Error);
  EXPECT_THROW(collapse_fraction_mc(2, 2, 0, 0), Error);
}

TEST(SignPattern, NegatingARowFlipsOnlyThatSign) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd b = gaussian_matrix(6, 3, rng);
    const Eigen::VectorXd x = positive_points(1, 3, rng).transpose();
    const auto before = sign_pattern(b, x);
    const Eigen::Index row = trial % 6;
    b.row(row) *= -1.0;
    const auto after = sign_pattern(b, x);
    for (std::size_t i = 0; i < before.size(); ++i) {
      EXPECT_EQ(after[i], static_cast<Eigen::Index>(i) == row ? -before[i] : before[i]);
    }
  }
}

TEST(Spiral, Geometry) {
  const Eigen::MatrixXd p = spiral_points(1000, 3.0);
  EXPECT_EQ(p.rows(), 1000);
  EXPECT_DOUBLE_EQ(p.row(0).norm(), 0.0);
  EXPECT_NEAR(p.row(999).norm(), 1.0, 1e-12);
  EXPECT_NEAR(p(999, 0), 1.0, 1e-9);
}

TEST(Spiral, LowDimensionsLoseInformation) {
  const auto rows = spiral_experiment({2, 3, 15, 30}, 9);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_GE(rows[0].error, 10 * rows[3].error);
  EXPECT_GE(rows[1].error, 10 * rows[3].error);
  EXPECT_LT(rows[3].error, 1e-6);
}

TEST(Spiral, RankOneEmbeddingIsLossy) {
  const Eigen::MatrixXd p = spiral_points(1000, 3.0);
  Eigen::MatrixXd t(2, 2);
  t << 0.7, -0.3, 0.7, -0.3;
  for (auto mode : {SpiralReadback::kActiveRows, SpiralReadback::kPseudoInverse}) {
    EXPECT_GT(spiral_reconstruction_error(p, t, mode), 0.05);
  }
}

TEST(Spiral, ErrorFallsWithDimension) {
  // Spearman rank correlation between n and the mean error over 20 seeds.
  const std::vector<std::size_t> dims{2, 3, 5, 8, 15, 30};
  std::vector<double> mean(dims.size(), 0.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto rows = spiral_experiment(dims, seed);
    for (std::size_t i = 0; i < dims.size(); ++i) mean[i] += rows[i].error / 20;
  }
  std::vector<std::size_t> order(dims.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return mean[a] < mean[b]; });
  std::vector<double> rank(dims.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<double>(r);
  double d2 = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) d2 += std::pow(rank[i] - static_cast<double>(i), 2);
  const double k = static_cast<double>(dims.size());
  const double rho = 1 - 6 * d2 / (k * (k * k - 1));
  EXPECT_LT(rho, 0.0);
}

TEST(Spiral, RejectsOneDimension) { EXPECT_THROW(spiral_experiment({1}, 0), Error); }

ModelSpec tiny_spec() {
  ModelSpec spec;
  spec.width_multiplier = 0.35;
  spec.input_resolution = 96;
  return spec;
}

TEST(Activations, CalibratedRandomModelIsHalfActive) {
  Model m = build_model(tiny_spec(), WeightInit::kRandom, 5);
  Rng cal(6);
  calibrate_batchnorm(m, tensor_random_gaussian({4, 96, 96, 3}, cal, 0.0f, 1.0f));
  Rng rng(7);
  const ActivationStats s =
      activation_pattern_stats(m, tensor_random_gaussian({4, 96, 96, 3}, rng, 0.0f, 1.0f));
  ASSERT_EQ(s.layers.size(), 35u);
  for (const auto& l : s.layers) {
    EXPECT_LE(l.min_positive, l.mean_positive);
    EXPECT_LE(l.mean_positive, l.max_positive);
    EXPECT_LE(l.max_positive, static_cast<double>(l.channels));
    EXPECT_GT(l.mean_fraction(), 0.4) << l.name;
    EXPECT_LT(l.mean_fraction(), 0.6) << l.name;
  }
}

TEST(Activations, ThresholdIsBottleneckWidth) {
  const Model m = build_model(tiny_spec(), WeightInit::kRandom, 5);
  const ActivationStats s = activation_pattern_stats(m, tensor_new({1, 96, 96, 3}, 0.1f));
  for (const auto& l : s.layers) {
    if (l.name.find(".expand") != std::string::npos) {
      EXPECT_EQ(l.threshold * 6, l.channels) << l.name;
    }
  }
}

TEST(Activations, NegativeBiasesSilenceLayersFedByClampedInputs) {
  Model m = build_model(tiny_spec(), WeightInit::kRandom, 5);
  for (auto& p : parameters(m)) {
    if (p.info.name.ends_with(".bias")) std::fill(p.values->begin(), p.values->end(), -100.0f);
  }
  Rng rng(8);
  const ActivationStats s =
      activation_pattern_stats(m, tensor_random_gaussian({2, 96, 96, 3}, rng, 0.0f, 1.0f),
                               ActivationAggregation::kPerFeatureMapAny);
  std::size_t checked = 0;
  for (const auto& l : s.layers) {
    if (l.name == "stem" || l.name.ends_with(".depthwise")) {
      EXPECT_LT(l.mean_fraction(), 0.01) << l.name;
      ++checked;
    }
  }
  EXPECT_GT(checked, 1u);
}

}  // namespace
}  // namespace btn
