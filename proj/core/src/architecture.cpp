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

#include "btn/architecture.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "btn/cascade.hpp"
#include "btn/error.hpp"
#include "btn/rng.hpp"

namespace btn {
namespace {

std::string block_name(std::size_t index) { return "blocks." + std::to_string(index); }

void init_conv(Conv2dParams& p, Rng& rng, double gain) {
  const double fan_in = static_cast<double>(p.kernel * p.kernel * p.in_channels);
  fill_gaussian(p.weights, rng, 0.0, std::sqrt(gain / fan_in));
  std::fill(p.bias.begin(), p.bias.end(), 0.0f);
}

void init_depthwise(DepthwiseParams& p, Rng& rng, double gain) {
  const double fan_in = static_cast<double>(p.kernel * p.kernel);
  fill_gaussian(p.weights, rng, 0.0, std::sqrt(gain / fan_in));
  std::fill(p.bias.begin(), p.bias.end(), 0.0f);
}

std::vector<std::uint32_t> conv_dims(const Conv2dParams& p) {
  return {static_cast<std::uint32_t>(p.kernel), static_cast<std::uint32_t>(p.kernel),
          static_cast<std::uint32_t>(p.in_channels), static_cast<std::uint32_t>(p.out_channels)};
}

std::vector<std::uint32_t> depthwise_dims(const DepthwiseParams& p) {
  return {static_cast<std::uint32_t>(p.kernel), static_cast<std::uint32_t>(p.kernel),
          static_cast<std::uint32_t>(p.channels)};
}

std::vector<std::uint32_t> vector_dims(std::size_t n) {
  return {static_cast<std::uint32_t>(n)};
}

// Shared walk over every parameter vector in container order.
template <typename ModelT, typename Emit>
void visit_parameters(ModelT& model, Emit&& emit) {
  emit("stem.weight", conv_dims(model.stem), model.stem.weights);
  emit("stem.bias", vector_dims(model.stem.out_channels), model.stem.bias);
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    auto& b = model.blocks[i];
    const std::string prefix = block_name(i);
    if (b.expand) {
      emit(prefix + ".expand.weight", conv_dims(*b.expand), b.expand->weights);
      emit(prefix + ".expand.bias", vector_dims(b.expand->out_channels), b.expand->bias);
    }
    emit(prefix + ".depthwise.weight", depthwise_dims(b.depthwise), b.depthwise.weights);
    emit(prefix + ".depthwise.bias", vector_dims(b.depthwise.channels), b.depthwise.bias);
    emit(prefix + ".project.weight", conv_dims(b.project), b.project.weights);
    emit(prefix + ".project.bias", vector_dims(b.project.out_channels), b.project.bias);
  }
  emit("head.weight", conv_dims(model.head), model.head.weights);
  emit("head.bias", vector_dims(model.head.out_channels), model.head.bias);
  emit("classifier.weight", conv_dims(model.classifier), model.classifier.weights);
  emit("classifier.bias", vector_dims(model.classifier.out_channels), model.classifier.bias);
}

}  // namespace

std::vector<StageSpec> mobilenet_v2_stages() {
  return {{1, 16, 1, 1}, {6, 24, 2, 2}, {6, 32, 3, 2}, {6, 64, 4, 2},
          {6, 96, 3, 1}, {6, 160, 3, 2}, {6, 320, 1, 1}};
}

std::size_t apply_width_multiplier(std::size_t channels, double alpha) {
  if (channels == 0 || !(alpha > 0.0)) {
    throw Error(Errc::kInvalidArgument, "width multiplier needs c >= 1 and alpha > 0");
  }
  constexpr std::size_t kDivisor = 8;
  const double scaled = static_cast<double>(channels) * alpha;
  std::size_t rounded =
      static_cast<std::size_t>(scaled + kDivisor / 2.0) / kDivisor * kDivisor;
  rounded = std::max(kDivisor, rounded);
  if (static_cast<double>(rounded) < 0.9 * scaled) rounded += kDivisor;
  return rounded;
}

void ModelSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::kInvalidArgument, msg); };
  if (!(width_multiplier >= kMinWidthMultiplier && width_multiplier <= kMaxWidthMultiplier)) {
    std::ostringstream msg;
    msg << "alpha must lie in [" << kMinWidthMultiplier << ", " << kMaxWidthMultiplier
        << "], got " << width_multiplier;
    fail(msg.str());
  }
  if (input_resolution < kMinResolution || input_resolution > kMaxResolution) {
    fail("resolution must lie in [" + std::to_string(kMinResolution) + ", " +
         std::to_string(kMaxResolution) + "], got " + std::to_string(input_resolution));
  }
  if (stages.empty()) fail("model needs at least one stage");
  for (const StageSpec& s : stages) {
    if (s.repeats < 1) fail("stage repeat count must be >= 1");
    if (s.stride != 1 && s.stride != 2) fail("stage stride must be 1 or 2");
    if (!(s.expansion >= 1.0)) fail("stage expansion must be >= 1");
    if (s.channels == 0) fail("stage channel count must be positive");
  }
  if (input_channels == 0 || stem_channels == 0 || head_channels == 0 || num_classes == 0) {
    fail("channel and class counts must be positive");
  }
}

std::size_t ModelSpec::scaled_head_channels() const {
  return width_multiplier > 1.0 ? apply_width_multiplier(head_channels, width_multiplier)
                                : head_channels;
}

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kStem: return "stem";
    case LayerKind::kBottleneck: return "bottleneck";
    case LayerKind::kHead: return "head";
    case LayerKind::kPool: return "pool";
    case LayerKind::kClassifier: return "classifier";
  }
  return "unknown";
}

std::vector<LayerGeometry> model_layout(const ModelSpec& spec) {
  spec.validate();
  std::vector<LayerGeometry> layers;
  std::size_t h = spec.input_resolution;
  std::size_t w = spec.input_resolution;

  LayerGeometry stem;
  stem.kind = LayerKind::kStem;
  stem.name = "stem";
  stem.in_height = h;
  stem.in_width = w;
  stem.in_channels = spec.input_channels;
  stem.kernel = 3;
  stem.stride = 2;
  stem.out_height = h = same_output_extent(h, 2);
  stem.out_width = w = same_output_extent(w, 2);
  stem.out_channels = apply_width_multiplier(spec.stem_channels, spec.width_multiplier);
  layers.push_back(stem);

  std::size_t channels = stem.out_channels;
  std::size_t index = 0;
  for (std::size_t s = 0; s < spec.stages.size(); ++s) {
    const StageSpec& stage = spec.stages[s];
    const std::size_t out_c = apply_width_multiplier(stage.channels, spec.width_multiplier);
    for (std::size_t r = 0; r < stage.repeats; ++r, ++index) {
      LayerGeometry g;
      g.kind = LayerKind::kBottleneck;
      g.name = block_name(index);
      g.stage = s + 1;
      g.in_height = h;
      g.in_width = w;
      g.in_channels = channels;
      g.kernel = 3;
      g.stride = r == 0 ? stage.stride : 1;
      g.expansion = stage.expansion;
      g.expanded_channels = expanded_width(channels, stage.expansion);
      g.expand_conv = !(spec.fuse_t1_expand && g.expanded_channels == channels);
      g.out_height = h = same_output_extent(h, g.stride);
      g.out_width = w = same_output_extent(w, g.stride);
      g.out_channels = out_c;
      g.residual = g.stride == 1 && channels == out_c;
      layers.push_back(g);
      channels = out_c;
    }
  }

  LayerGeometry head;
  head.kind = LayerKind::kHead;
  head.name = "head";
  head.in_height = head.out_height = h;
  head.in_width = head.out_width = w;
  head.in_channels = channels;
  head.out_channels = spec.scaled_head_channels();
  layers.push_back(head);

  LayerGeometry pool;
  pool.kind = LayerKind::kPool;
  pool.name = "pool";
  pool.in_height = h;
  pool.in_width = w;
  pool.in_channels = pool.out_channels = head.out_channels;
  pool.out_height = pool.out_width = 1;
  pool.kernel = h;
  layers.push_back(pool);

  LayerGeometry classifier;
  classifier.kind = LayerKind::kClassifier;
  classifier.name = "classifier";
  classifier.in_height = classifier.in_width = 1;
  classifier.out_height = classifier.out_width = 1;
  classifier.in_channels = head.out_channels;
  classifier.out_channels = spec.num_classes;
  layers.push_back(classifier);
  return layers;
}

Model build_model(const ModelSpec& spec, WeightInit init, std::uint64_t seed) {
  Model model;
  model.spec = spec;
  for (const LayerGeometry& g : model_layout(spec)) {
    switch (g.kind) {
      case LayerKind::kStem:
        model.stem = Conv2dParams::zeros(g.kernel, g.stride, g.in_channels, g.out_channels);
        break;
      case LayerKind::kBottleneck: {
        BottleneckConfig config;
        config.in_channels = g.in_channels;
        config.out_channels = g.out_channels;
        config.expansion = g.expansion;
        config.stride = g.stride;
        config.fuse_t1_expand = spec.fuse_t1_expand;
        model.blocks.push_back(make_bottleneck(config));
        model.block_stage.push_back(g.stage);
        break;
      }
      case LayerKind::kHead:
        model.head = Conv2dParams::zeros(1, 1, g.in_channels, g.out_channels);
        break;
      case LayerKind::kPool:
        break;
      case LayerKind::kClassifier:
        model.classifier = Conv2dParams::zeros(1, 1, g.in_channels, g.out_channels);
        break;
    }
  }
  if (init == WeightInit::kRandom) {
    Rng rng(seed);
    init_conv(model.stem, rng, 2.0);
    for (BottleneckParams& b : model.blocks) {
      if (b.expand) init_conv(*b.expand, rng, 2.0);
      init_depthwise(b.depthwise, rng, 2.0);
      init_conv(b.project, rng, 1.0);
    }
    init_conv(model.head, rng, 2.0);
    init_conv(model.classifier, rng, 1.0);
  }
  return model;
}

std::vector<ParameterRef> parameters(Model& model) {
  std::vector<ParameterRef> out;
  visit_parameters(model, [&](std::string name, std::vector<std::uint32_t> dims,
                              std::vector<float>& values) {
    out.push_back({{std::move(name), std::move(dims)}, &values});
  });
  return out;
}

std::vector<ConstParameterRef> parameters(const Model& model) {
  std::vector<ConstParameterRef> out;
  visit_parameters(model, [&](std::string name, std::vector<std::uint32_t> dims,
                              const std::vector<float>& values) {
    out.push_back({{std::move(name), std::move(dims)}, &values});
  });
  return out;
}

std::vector<ParameterInfo> parameter_schema(const Model& model) {
  std::vector<ParameterInfo> out;
  for (auto& p : parameters(model)) out.push_back(std::move(p.info));
  return out;
}

namespace {

void normalize_channels(const Tensor& pre, std::vector<float>& weights, std::vector<float>& bias,
                        std::size_t out_channels) {
  const std::size_t c = pre.shape().channels;
  std::vector<double> sum(c, 0.0), sq(c, 0.0);
  const auto data = pre.data();
  for (std::size_t i = 0; i < data.size(); i += c) {
    for (std::size_t j = 0; j < c; ++j) {
      const double v = data[i + j];
      sum[j] += v;
      sq[j] += v * v;
    }
  }
  const double count = static_cast<double>(data.size() / c);
  std::vector<float> scale(c);
  bias.assign(c, 0.0f);
  for (std::size_t j = 0; j < c; ++j) {
    const double mean = sum[j] / count;
    const double var = std::max(sq[j] / count - mean * mean, 0.0);
    const double inv = 1.0 / std::sqrt(var + 1e-3);
    scale[j] = static_cast<float>(inv);
    bias[j] = static_cast<float>(-mean * inv);
  }
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] *= scale[i % out_channels];
}

Tensor calibrate_conv(const Tensor& x, Conv2dParams& p, const ExecContext& ctx) {
  p.bias.assign(p.out_channels, 0.0f);
  normalize_channels(conv2d(x, p, ctx), p.weights, p.bias, p.out_channels);
  return conv2d(x, p, ctx);
}

Tensor calibrate_depthwise(const Tensor& x, DepthwiseParams& p, const ExecContext& ctx) {
  p.bias.assign(p.channels, 0.0f);
  normalize_channels(depthwise_conv(x, p, ctx), p.weights, p.bias, p.channels);
  return depthwise_conv(x, p, ctx);
}

}  // namespace

void calibrate_batchnorm(Model& model, const Tensor& batch, const ExecContext& ctx) {
  const Shape& s = batch.shape();
  if (s.height != model.spec.input_resolution || s.width != model.spec.input_resolution ||
      s.channels != model.spec.input_channels) {
    throw Error(Errc::kShapeMismatch, "calibration batch " + to_string(s) +
                                          " does not match the model input");
  }
  Tensor x = relu6(calibrate_conv(batch, model.stem, ctx));
  for (BottleneckParams& block : model.blocks) {
    const Tensor& input = x;
    std::optional<Tensor> expanded;
    if (block.expand) expanded = relu6(calibrate_conv(input, *block.expand, ctx));
    const Tensor filtered =
        relu6(calibrate_depthwise(expanded ? *expanded : input, block.depthwise, ctx));
    Tensor out = calibrate_conv(filtered, block.project, ctx);
    if (block.residual) out = add_residual(out, input);
    x = std::move(out);
  }
  calibrate_conv(x, model.head, ctx);
}

Tensor forward(const Model& model, const Tensor& input, const ForwardOptions& options) {
  const Shape& s = input.shape();
  const std::size_t res = model.spec.input_resolution;
  if (s.height != res || s.width != res || s.channels != model.spec.input_channels) {
    throw Error(Errc::kShapeMismatch,
                "input " + to_string(s) + " does not match the model's " + std::to_string(res) +
                    "x" + std::to_string(res) + "x" +
                    std::to_string(model.spec.input_channels) + " input");
  }
  if (options.split == 0) throw Error(Errc::kInvalidArgument, "split must be >= 1");
  if (options.observer && options.split != 1) {
    throw Error(Errc::kInvalidArgument, "activation observers require split == 1");
  }
  const ExecContext& ctx = options.ctx;
  std::size_t layer_index = 0;
  auto observe = [&](const std::string& name, std::size_t threshold, const Tensor& t) {
    if (options.observer) options.observer({layer_index, name, threshold, &t});
    ++layer_index;
  };

  Tensor x = relu6(conv2d(input, model.stem, ctx));
  observe("stem", model.stem.in_channels, x);

  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    const BottleneckParams& block = model.blocks[i];
    if (options.split == 1) {
      const std::string prefix = block_name(i);
      x = bottleneck_forward(x, block, ctx, [&](std::string_view stage, const Tensor& t) {
        observe(prefix + "." + std::string(stage), block.in_channels, t);
      });
    } else {
      const std::size_t t = std::min(options.split, block.expanded_channels);
      x = cascade_execute(x, block, CascadePlan::make(block.expanded_channels, t), ctx).output;
    }
  }

  Tensor features = relu6(conv2d(x, model.head, ctx));
  observe("head", model.head.in_channels, features);
  return conv2d(global_avgpool(features), model.classifier, ctx);
}

}  // namespace btn
