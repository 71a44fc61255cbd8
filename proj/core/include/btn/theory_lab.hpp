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
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "btn/architecture.hpp"
#include "btn/parallel.hpp"

namespace btn {

// Numerical checks of ReLU information preservation for y = ReLU(Bx) with
// B an m x n matrix. Computations run in double precision.

/// Matrix with i.i.d. N(0, 1) entries drawn row by row from rng.
Eigen::MatrixXd gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);

/// Each row is a point with coordinates uniform in (0, 1].
Eigen::MatrixXd positive_points(std::size_t count, std::size_t dim, Rng& rng);

/// True iff ReLU(x) reproduces every coordinate bit for bit. Points are rows.
/// Throws Errc::kInvalidArgument if a coordinate is not strictly positive.
bool relu_interior_identity_check(const Eigen::MatrixXd& points);

Eigen::VectorXd relu(const Eigen::VectorXd& v);

/// Row indices i with y0[i] != 0.
std::vector<std::size_t> active_rows(const Eigen::VectorXd& y0);

/// Numerical rank: diagonal entries of a column-pivoted QR exceeding
/// 1e-8 times the largest singular value.
std::size_t numerical_rank(const Eigen::MatrixXd& m);

/// y0 = ReLU(B x0) determines x0 iff y0 has at least n nonzero entries whose
/// rows of B have rank n. Throws Errc::kShapeMismatch on dimension mismatch.
bool invertibility_condition(const Eigen::MatrixXd& b, const Eigen::VectorXd& y0);

/// Least-squares solution of B_T x = y_T on the active rows T. Throws
/// Errc::kNotInvertible when the condition fails.
Eigen::VectorXd recover_input(const Eigen::MatrixXd& b, const Eigen::VectorXd& y0);

/// +1 / -1 / 0 per coordinate of B x.
std::vector<int> sign_pattern(const Eigen::MatrixXd& b, const Eigen::VectorXd& x);

/// N_{m,n} / 2^m with N_{m,n} = sum_{k=0}^{m-n} C(m, k): the probability that
/// at least n of m coordinates of Bx are positive for sign-symmetric B.
double preserved_fraction_exact(std::size_t n, std::size_t m);

/// 1 - 2^(-m/2).
double collapse_bound(std::size_t m);

struct CollapseResult {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t preserved = 0;
  double fraction = 0.0;
  double expected = 0.0;
  /// sqrt(p (1 - p) / trials) at the exact p.
  double standard_error = 0.0;
};

/// Trial i uses Rng(seed + i): B (m x n, Gaussian) then x uniform on [0,1]^n.
/// A trial preserves x when B x has at least n positive entries. Throws
/// Errc::kInvalidArgument unless m >= n >= 1 and trials >= 1.
CollapseResult collapse_fraction_mc(std::size_t n, std::size_t m, std::size_t trials,
                                    std::uint64_t seed, const ExecContext& ctx = {});

enum class SpiralReadback {
  /// Least squares on the rows left active by the ReLU.
  kActiveRows,
  /// Plain pseudo-inverse of T applied to the whole ReLU output.
  kPseudoInverse,
};

const char* spiral_readback_name(SpiralReadback readback);

struct SpiralOptions {
  std::size_t points = 1000;
  double turns = 3.0;
  SpiralReadback readback = SpiralReadback::kActiveRows;
};

/// Rows (r cos theta, r sin theta) with theta evenly spaced over `turns`
/// revolutions and r rising linearly from 0 to 1.
Eigen::MatrixXd spiral_points(std::size_t points, double turns);

/// Mean squared 2-D error after embedding every point with ReLU(T p) and
/// reading it back.
double spiral_reconstruction_error(const Eigen::MatrixXd& spiral, const Eigen::MatrixXd& t,
                                   SpiralReadback readback);

struct SpiralRow {
  std::size_t dims = 0;
  double error = 0.0;
};

/// For each n, T is the first n rows of one Gaussian stream from Rng(seed), so
/// the embeddings are nested. Throws Errc::kInvalidArgument for n < 2.
std::vector<SpiralRow> spiral_experiment(const std::vector<std::size_t>& dims,
                                         std::uint64_t seed, const SpiralOptions& options = {});

enum class ActivationAggregation {
  /// Positive channels counted at each spatial location.
  kPerLocation,
  /// A channel counts once per image if any location is positive.
  kPerFeatureMapAny,
};

const char* activation_aggregation_name(ActivationAggregation aggregation);

struct LayerActivationStats {
  std::size_t index = 0;
  std::string name;
  std::size_t channels = 0;
  std::size_t threshold = 0;
  double min_positive = 0.0;
  double mean_positive = 0.0;
  double max_positive = 0.0;

  double mean_fraction() const noexcept {
    return channels == 0 ? 0.0 : mean_positive / static_cast<double>(channels);
  }
};

struct ActivationStats {
  std::size_t batch = 0;
  ActivationAggregation aggregation = ActivationAggregation::kPerLocation;
  std::vector<LayerActivationStats> layers;
};

/// Positive-channel counts (strictly > 0) of every post-ReLU6 activation,
/// evaluated one image at a time.
ActivationStats activation_pattern_stats(
    const Model& model, const Tensor& batch,
    ActivationAggregation aggregation = ActivationAggregation::kPerLocation,
    const ExecContext& ctx = {});

}  // namespace btn
