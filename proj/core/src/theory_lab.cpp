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

#include "btn/theory_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <string>

#include "btn/error.hpp"
#include "btn/rng.hpp"

namespace btn {

Eigen::MatrixXd gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.gaussian();
  }
  return m;
}

Eigen::MatrixXd positive_points(std::size_t count, std::size_t dim, Rng& rng) {
  Eigen::MatrixXd m(count, dim);
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = 1.0 - rng.uniform();
  }
  return m;
}

bool relu_interior_identity_check(const Eigen::MatrixXd& points) {
  bool identical = true;
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      const double x = points(r, c);
      if (!(x > 0.0)) {
        throw Error(Errc::kInvalidArgument, "interior points need strictly positive coordinates");
      }
      const double y = std::max(x, 0.0);
      if (std::memcmp(&x, &y, sizeof x) != 0) identical = false;
    }
  }
  return identical;
}

Eigen::VectorXd relu(const Eigen::VectorXd& v) { return v.cwiseMax(0.0); }

std::vector<std::size_t> active_rows(const Eigen::VectorXd& y0) {
  std::vector<std::size_t> rows;
  for (Eigen::Index i = 0; i < y0.size(); ++i) {
    if (y0[i] != 0.0) rows.push_back(static_cast<std::size_t>(i));
  }
  return rows;
}

std::size_t numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  const double sigma_max = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
  if (sigma_max == 0.0) return 0;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  const auto r = qr.matrixQR();
  const Eigen::Index diag = std::min(r.rows(), r.cols());
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < diag; ++i) {
    if (std::abs(r(i, i)) > 1e-8 * sigma_max) ++rank;
  }
  return rank;
}

namespace {

void check_dims(const Eigen::MatrixXd& b, const Eigen::VectorXd& y0) {
  if (b.rows() != y0.size() || b.cols() == 0) {
    throw Error(Errc::kShapeMismatch, "B is " + std::to_string(b.rows()) + "x" +
                                          std::to_string(b.cols()) + " but y0 has " +
                                          std::to_string(y0.size()) + " entries");
  }
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

Eigen::VectorXd select_rows(const Eigen::VectorXd& v, const std::vector<std::size_t>& rows) {
  Eigen::VectorXd out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
  return out;
}

}  // namespace

bool invertibility_condition(const Eigen::MatrixXd& b, const Eigen::VectorXd& y0) {
  check_dims(b, y0);
  const auto rows = active_rows(y0);
  const std::size_t n = static_cast<std::size_t>(b.cols());
  if (rows.size() < n) return false;
  return numerical_rank(select_rows(b, rows)) == n;
}

Eigen::VectorXd recover_input(const Eigen::MatrixXd& b, const Eigen::VectorXd& y0) {
  if (!invertibility_condition(b, y0)) {
    throw Error(Errc::kNotInvertible,
                "ReLU output keeps fewer than n independent active rows; input not recoverable");
  }
  const auto rows = active_rows(y0);
  return select_rows(b, rows).colPivHouseholderQr().solve(select_rows(y0, rows));
}

std::vector<int> sign_pattern(const Eigen::MatrixXd& b, const Eigen::VectorXd& x) {
  if (b.cols() != x.size()) throw Error(Errc::kShapeMismatch, "B columns must match x");
  const Eigen::VectorXd y = b * x;
  std::vector<int> signs(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) signs[i] = (y[i] > 0.0) - (y[i] < 0.0);
  return signs;
}

double preserved_fraction_exact(std::size_t n, std::size_t m) {
  if (n == 0 || m < n) throw Error(Errc::kInvalidArgument, "need m >= n >= 1");
  long double binom = 1.0L;
  long double sum = 0.0L;
  for (std::size_t k = 0; k <= m - n; ++k) {
    sum += binom;
    binom = binom * static_cast<long double>(m - k) / static_cast<long double>(k + 1);
  }
  return static_cast<double>(std::ldexp(sum, -static_cast<int>(m)));
}

double collapse_bound(std::size_t m) { return 1.0 - std::pow(2.0, -static_cast<double>(m) / 2.0); }

CollapseResult collapse_fraction_mc(std::size_t n, std::size_t m, std::size_t trials,
                                    std::uint64_t seed, const ExecContext& ctx) {
  if (n == 0) throw Error(Errc::kInvalidArgument, "n must be at least 1");
  if (m < n) {
    throw Error(Errc::kInvalidArgument, "m (" + std::to_string(m) + ") must be >= n (" +
                                            std::to_string(n) + ")");
  }
  if (trials == 0) throw Error(Errc::kInvalidArgument, "trials must be at least 1");

  const std::size_t threads = resolve_threads(ctx);
  const std::size_t chunks = std::min(threads, trials);
  std::vector<std::size_t> counts(chunks, 0);
  const std::size_t per_chunk = (trials + chunks - 1) / chunks;
  parallel_for(chunks, chunks, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const std::size_t lo = c * per_chunk;
      const std::size_t hi = std::min(trials, lo + per_chunk);
      std::size_t preserved = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        Rng rng(seed + i);
        const Eigen::MatrixXd b = gaussian_matrix(m, n, rng);
        Eigen::VectorXd x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = rng.uniform();
        if (static_cast<std::size_t>(((b * x).array() > 0.0).count()) >= n) ++preserved;
      }
      counts[c] = preserved;
    }
  });

  CollapseResult result;
  result.n = n;
  result.m = m;
  result.trials = trials;
  result.seed = seed;
  for (std::size_t c : counts) result.preserved += c;
  result.fraction = static_cast<double>(result.preserved) / static_cast<double>(trials);
  result.expected = preserved_fraction_exact(n, m);
  result.standard_error =
      std::sqrt(result.expected * (1.0 - result.expected) / static_cast<double>(trials));
  return result;
}

const char* spiral_readback_name(SpiralReadback readback) {
  switch (readback) {
    case SpiralReadback::kActiveRows:
      return "active-rows";
    case SpiralReadback::kPseudoInverse:
      return "pseudo-inverse";
  }
  return "unknown";
}

Eigen::MatrixXd spiral_points(std::size_t points, double turns) {
  if (points < 2) throw Error(Errc::kInvalidArgument, "spiral needs at least 2 points");
  Eigen::MatrixXd p(points, 2);
  const double span = 2.0 * std::numbers::pi * turns;
  for (std::size_t i = 0; i < points; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(points - 1);
    const double theta = span * u;
    p(i, 0) = u * std::cos(theta);
    p(i, 1) = u * std::sin(theta);
  }
  return p;
}

double spiral_reconstruction_error(const Eigen::MatrixXd& spiral, const Eigen::MatrixXd& t,
                                   SpiralReadback readback) {
  if (spiral.cols() != t.cols()) {
    throw Error(Errc::kShapeMismatch, "spiral dimension must match the columns of T");
  }
  const Eigen::MatrixXd embedded = (spiral * t.transpose()).cwiseMax(0.0);
  Eigen::MatrixXd restored(spiral.rows(), spiral.cols());
  if (readback == SpiralReadback::kPseudoInverse) {
    const Eigen::MatrixXd pinv = t.completeOrthogonalDecomposition().pseudoInverse();
    restored = embedded * pinv.transpose();
  } else {
    for (Eigen::Index i = 0; i < spiral.rows(); ++i) {
      const Eigen::VectorXd y = embedded.row(i).transpose();
      const auto rows = active_rows(y);
      if (rows.empty()) {
        restored.row(i).setZero();
        continue;
      }
      const Eigen::VectorXd x =
          select_rows(t, rows).completeOrthogonalDecomposition().solve(select_rows(y, rows));
      restored.row(i) = x.transpose();
    }
  }
  return (restored - spiral).rowwise().squaredNorm().mean();
}

std::vector<SpiralRow> spiral_experiment(const std::vector<std::size_t>& dims,
                                         std::uint64_t seed, const SpiralOptions& options) {
  std::size_t widest = 0;
  for (std::size_t n : dims) {
    if (n < 2) throw Error(Errc::kInvalidArgument, "spiral dims must be >= 2");
    widest = std::max(widest, n);
  }
  const Eigen::MatrixXd spiral = spiral_points(options.points, options.turns);
  Rng rng(seed);
  const Eigen::MatrixXd stream = gaussian_matrix(widest, 2, rng);
  std::vector<SpiralRow> rows;
  for (std::size_t n : dims) {
    rows.push_back({n, spiral_reconstruction_error(spiral, stream.topRows(n), options.readback)});
  }
  return rows;
}

const char* activation_aggregation_name(ActivationAggregation aggregation) {
  switch (aggregation) {
    case ActivationAggregation::kPerLocation:
      return "per-location";
    case ActivationAggregation::kPerFeatureMapAny:
      return "per-feature-map-any";
  }
  return "unknown";
}

namespace {

struct Accumulator {
  std::size_t samples = 0;
  double sum = 0.0;
  std::size_t min = std::numeric_limits<std::size_t>::max();
  std::size_t max = 0;

  void add(std::size_t count) {
    ++samples;
    sum += static_cast<double>(count);
    min = std::min(min, count);
    max = std::max(max, count);
  }
};

}  // namespace

ActivationStats activation_pattern_stats(const Model& model, const Tensor& batch,
                                         ActivationAggregation aggregation,
                                         const ExecContext& ctx) {
  const Shape& bs = batch.shape();
  const Shape one{1, bs.height, bs.width, bs.channels};
  std::vector<LayerActivationStats> layers;
  std::vector<Accumulator> acc;

  ForwardOptions options;
  options.ctx = ctx;
  options.observer = [&](const LayerActivation& a) {
    const Shape& s = a.tensor->shape();
    if (a.index == layers.size()) {
      LayerActivationStats info;
      info.index = a.index;
      info.name = a.name;
      info.channels = s.channels;
      info.threshold = a.threshold_channels;
      layers.push_back(info);
      acc.emplace_back();
    }
    const auto data = a.tensor->data();
    const std::size_t pixels = s.height * s.width;
    Accumulator& into = acc[a.index];
    if (aggregation == ActivationAggregation::kPerLocation) {
      for (std::size_t p = 0; p < pixels; ++p) {
        std::size_t positive = 0;
        for (std::size_t c = 0; c < s.channels; ++c) positive += data[p * s.channels + c] > 0.0f;
        into.add(positive);
      }
    } else {
      std::vector<bool> any(s.channels, false);
      for (std::size_t p = 0; p < pixels; ++p) {
        for (std::size_t c = 0; c < s.channels; ++c) {
          if (data[p * s.channels + c] > 0.0f) any[c] = true;
        }
      }
      into.add(static_cast<std::size_t>(std::count(any.begin(), any.end(), true)));
    }
  };

  const std::size_t image = one.numel();
  for (std::size_t b = 0; b < bs.batch; ++b) {
    const auto src = batch.data().subspan(b * image, image);
    const Tensor input(one, std::vector<float>(src.begin(), src.end()));
    forward(model, input, options);
  }

  ActivationStats stats;
  stats.batch = bs.batch;
  stats.aggregation = aggregation;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].min_positive = static_cast<double>(acc[i].min);
    layers[i].max_positive = static_cast<double>(acc[i].max);
    layers[i].mean_positive = acc[i].sum / static_cast<double>(acc[i].samples);
  }
  stats.layers = std::move(layers);
  return stats;
}

}  // namespace btn
