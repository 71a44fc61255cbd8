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

#include <filesystem>
#include <sstream>

#include "btn/error.hpp"
#include "btn/weights.hpp"

namespace btn {
namespace {

Model small_model(std::uint64_t seed) {
  ModelSpec spec;
  spec.width_multiplier = 0.35;
  spec.input_resolution = 96;
  spec.num_classes = 10;
  return build_model(spec, WeightInit::kRandom, seed);
}

Errc load_error(const Model& m, const WeightContainer& c) {
  try {
    load_weights(m, c);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::kInvariant;
}

TEST(Weights, StreamRoundTrip) {
  const Model m = small_model(1);
  const WeightContainer c = save_weights(m);
  EXPECT_EQ(c.payload.size(), c.expected_payload());
  std::stringstream buf;
  write_weight_container(buf, c);
  EXPECT_EQ(buf.str().substr(0, 4), "BWGT");
  const WeightContainer back = read_weight_container(buf);
  EXPECT_EQ(back.manifest, c.manifest);
  EXPECT_EQ(back.payload, c.payload);
  const Model loaded = load_weights(small_model(2), back);
  EXPECT_EQ(loaded.blocks[5].depthwise.weights, m.blocks[5].depthwise.weights);
  EXPECT_EQ(loaded.classifier.bias, m.classifier.bias);
}

TEST(Weights, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "btn_weights_test.bwgt";
  const WeightContainer c = save_weights(small_model(3));
  save_weight_file(path, c);
  EXPECT_EQ(load_weight_file(path).payload, c.payload);
  std::filesystem::remove(path);
}

TEST(Weights, RenamedEntryIsNameMismatch) {
  WeightContainer c = save_weights(small_model(1));
  c.manifest[3].name = "blocks.99.bogus";
  EXPECT_EQ(load_error(small_model(2), c), Errc::kNameMismatch);
}

TEST(Weights, MissingEntryIsNameMismatch) {
  WeightContainer c = save_weights(small_model(1));
  const auto n = c.manifest.back().numel();
  c.manifest.pop_back();
  c.payload.resize(c.payload.size() - n);
  EXPECT_EQ(load_error(small_model(2), c), Errc::kNameMismatch);
}

TEST(Weights, ReshapedEntryIsShapeMismatch) {
  WeightContainer c = save_weights(small_model(1));
  std::swap(c.manifest[0].dims[0], c.manifest[0].dims[3]);
  c.manifest[0].dims[0] += 1;
  EXPECT_EQ(load_error(small_model(2), c), Errc::kShapeMismatch);
}

TEST(Weights, ShortPayloadIsPayloadLength) {
  WeightContainer c = save_weights(small_model(1));
  c.payload.pop_back();
  EXPECT_EQ(load_error(small_model(2), c), Errc::kPayloadLength);
}

TEST(Weights, FailedLoadLeavesModelUntouched) {
  const Model target = small_model(2);
  const auto before = target.blocks[0].project.weights;
  WeightContainer c = save_weights(small_model(1));
  c.payload.push_back(0.0f);
  EXPECT_THROW(load_weights(target, c), Error);
  EXPECT_EQ(target.blocks[0].project.weights, before);
}

TEST(Weights, TruncatedManifestIsFormatError) {
  std::stringstream buf;
  write_weight_container(buf, save_weights(small_model(1)));
  std::stringstream cut(buf.str().substr(0, 20));
  try {
    read_weight_container(cut);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kFormat);
  }
}

}  // namespace
}  // namespace btn
