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
#include <functional>
#include <string>
#include <vector>

#include "btn/blocks.hpp"
#include "btn/kernels.hpp"

namespace btn {

/// One row of the network table: n blocks with expansion t and c output
/// channels; the first block uses stride s, the rest stride 1.
struct StageSpec {
  double expansion = 6.0;
  std::size_t channels = 0;
  std::size_t repeats = 1;
  std::size_t stride = 1;
};

/// The seven bottleneck rows of MobileNetV2:
/// (1,16,1,1) (6,24,2,2) (6,32,3,2) (6,64,4,2) (6,96,3,1) (6,160,3,2) (6,320,1,1).
std::vector<StageSpec> mobilenet_v2_stages();

inline constexpr double kMinWidthMultiplier = 0.35;
inline constexpr double kMaxWidthMultiplier = 1.4;
inline constexpr std::size_t kMinResolution = 96;
inline constexpr std::size_t kMaxResolution = 224;

struct ModelSpec {
  std::size_t input_resolution = 224;
  double width_multiplier = 1.0;
  std::vector<StageSpec> stages = mobilenet_v2_stages();
  std::size_t input_channels = 3;
  std::size_t stem_channels = 32;
  std::size_t head_channels = 1280;
  std::size_t num_classes = 1000;
  bool fuse_t1_expand = true;

  /// Throws Errc::kInvalidArgument naming the offending field.
  void validate() const;
  /// Head width: unscaled for multipliers up to one, scaled above one.
  std::size_t scaled_head_channels() const;
};

/// Channel rounding for width multipliers: nearest multiple of 8, never below
/// 8, bumped by 8 when rounding lost more than 10% of c * alpha.
std::size_t apply_width_multiplier(std::size_t channels, double alpha);

enum class LayerKind { kStem, kBottleneck, kHead, kPool, kClassifier };

const char* layer_kind_name(LayerKind kind);

/// Static shape information for one layer of a model, derived from a spec
/// without allocating weights.
struct LayerGeometry {
  LayerKind kind = LayerKind::kStem;
  std::string name;
  std::size_t stage = 0;  // 1-based stage for bottlenecks, 0 otherwise
  std::size_t in_height = 0, in_width = 0, in_channels = 0;
  std::size_t out_height = 0, out_width = 0, out_channels = 0;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  double expansion = 1.0;
  std::size_t expanded_channels = 0;
  bool expand_conv = false;
  bool residual = false;
};

std::vector<LayerGeometry> model_layout(const ModelSpec& spec);

/// Parameters of a built network. Immutable once loaded; forward is reentrant.
struct Model {
  ModelSpec spec;
  Conv2dParams stem;
  std::vector<BottleneckParams> blocks;
  std::vector<std::size_t> block_stage;
  Conv2dParams head;
  Conv2dParams classifier;
};

enum class WeightInit {
  kZeros,
  /// N(0, 2/fan_in) weights for layers followed by ReLU6, N(0, 1/fan_in) for
  /// the linear projection and classifier; zero biases.
  kRandom,
};

Model build_model(const ModelSpec& spec, WeightInit init = WeightInit::kZeros,
                  std::uint64_t seed = 0);

/// Folds batch statistics of `batch` into every convolution that carries a
/// batch norm (all but the classifier), as at the first training step with
/// unit scale and zero offset: each channel's pre-activation over the batch
/// gets zero mean and unit variance. Layers are calibrated in network order on
/// the already calibrated upstream activations.
void calibrate_batchnorm(Model& model, const Tensor& batch, const ExecContext& ctx = {});

/// Name and dimensions of one parameter tensor, in container order.
struct ParameterInfo {
  std::string name;
  std::vector<std::uint32_t> dims;
};

struct ParameterRef {
  ParameterInfo info;
  std::vector<float>* values;
};

struct ConstParameterRef {
  ParameterInfo info;
  const std::vector<float>* values;
};

std::vector<ParameterRef> parameters(Model& model);
std::vector<ConstParameterRef> parameters(const Model& model);
std::vector<ParameterInfo> parameter_schema(const Model& model);

/// One post-ReLU6 activation observed during forward.
struct LayerActivation {
  std::size_t index = 0;
  std::string name;
  /// Width of the bottleneck the activation was expanded from; a ReLU layer
  /// is invertible only if at least this many channels stay positive.
  std::size_t threshold_channels = 0;
  const Tensor* tensor = nullptr;
};

using LayerObserver = std::function<void(const LayerActivation&)>;

struct ForwardOptions {
  /// Channel groups for the cascaded block evaluation; 1 runs every block
  /// monolithically. Clamped per block to its expanded width.
  std::size_t split = 1;
  ExecContext ctx;
  /// Only supported with split == 1, since cascaded blocks never hold a whole
  /// activation.
  LayerObserver observer;
};

/// Logits of shape (batch, 1, 1, num_classes).
Tensor forward(const Model& model, const Tensor& input, const ForwardOptions& options = {});

}  // namespace btn
