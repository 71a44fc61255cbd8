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
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "btn/tensor_io.hpp"
#include "btn/weights.hpp"
#include "cli.hpp"

namespace btn::cli {
namespace {

namespace fs = std::filesystem;

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp(const std::string& name) {
  return fs::temp_directory_path() / ("btn_cli_test_" + name);
}

TEST(Cli, HelpAndMissingSubcommand) {
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_EQ(run_cli({"bogus"}).code, kExitUsage);
}

TEST(Cli, SummarizeJsonTotals) {
  const Invocation r = run_cli({"summarize", "--alpha", "1.0", "--res", "224", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["totals"]["madds"], 300774272u);
  EXPECT_EQ(j["totals"]["params"], 3487816u);
  EXPECT_EQ(j["layers"].size(), 21u);
}

TEST(Cli, SummarizeRejectsBadAlphaByName) {
  const Invocation r = run_cli({"summarize", "--alpha", "0", "--res", "224"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("--alpha"), std::string::npos);
  EXPECT_EQ(run_cli({"summarize", "--res", "64"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"summarize", "--format", "xml"}).code, kExitUsage);
}

TEST(Cli, SummarizeIsByteDeterministic) {
  for (const char* format : {"csv", "json", "table"}) {
    const Invocation a = run_cli({"summarize", "--alpha", "0.75", "--res", "160", "--format", format});
    const Invocation b = run_cli({"summarize", "--alpha", "0.75", "--res", "160", "--format", format});
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.find('\r'), std::string::npos);
  }
}

TEST(Cli, SummarizeCsvHeader) {
  const Invocation r = run_cli({"summarize", "--format", "csv"});
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "# btn summarize alpha=1 res=224 classes=1000");
  EXPECT_NE(r.out.find("\ntotal,,,,,300774272,3487816,"), std::string::npos);
}

TEST(Cli, InferIsStableAndSplitMatches) {
  const auto a = temp("logits_a.bten"), b = temp("logits_b.bten");
  const std::vector<std::string> base{"infer", "--alpha", "0.5", "--res", "128",
                                      "--random-weights", "--seed", "1", "--input-seed", "2"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args);
  };
  const Invocation r1 = with({"--out", a.string()});
  const Invocation r2 = with({"--out", b.string(), "--split", "4"});
  ASSERT_EQ(r1.code, kExitOk) << r1.err;
  ASSERT_EQ(r2.code, kExitOk) << r2.err;
  EXPECT_LE(max_abs_rel_diff(load_tensor(a), load_tensor(b)), 1e-5);
  const Invocation again = with({"--out", a.string()});
  EXPECT_EQ(r1.out, again.out);
  auto body = [](const std::string& s) { return s.substr(s.find('\n')); };
  EXPECT_EQ(body(r1.out), body(r2.out));
  fs::remove(a);
  fs::remove(b);
}

TEST(Cli, InferWrongResolutionIsUsageError) {
  const auto in = temp("input96.bten"), out = temp("out.bten");
  save_tensor(in, tensor_new({1, 96, 96, 3}, 0.0f));
  const Invocation r = run_cli({"infer", "--res", "128", "--random-weights", "--input", in.string(),
                         "--out", out.string()});
  EXPECT_EQ(r.code, kExitUsage);
  fs::remove(in);
}

TEST(Cli, InferFlagCombinations) {
  const auto out = temp("o.bten").string();
  EXPECT_EQ(run_cli({"infer", "--input-seed", "1", "--out", out}).code, kExitUsage);
  EXPECT_EQ(run_cli({"infer", "--random-weights", "--out", out}).code, kExitUsage);
  EXPECT_EQ(run_cli({"infer", "--random-weights", "--input-seed", "1"}).code, kExitUsage);
}

TEST(Cli, WeightFileRoundTripAndErrors) {
  const auto w = temp("w.bwgt"), a = temp("a.bten"), b = temp("b.bten");
  const std::vector<std::string> model{"--alpha", "0.35", "--res", "96"};
  auto cmd = [&](std::vector<std::string> head, std::vector<std::string> tail) {
    head.insert(head.end(), model.begin(), model.end());
    head.insert(head.end(), tail.begin(), tail.end());
    return run_cli(head);
  };
  ASSERT_EQ(cmd({"init-weights"}, {"--seed", "4", "--out", w.string()}).code, kExitOk);
  const Invocation from_file =
      cmd({"infer"}, {"--weights", w.string(), "--input-seed", "5", "--out", a.string()});
  const Invocation random = cmd({"infer"}, {"--random-weights", "--seed", "4", "--input-seed", "5",
                                     "--out", b.string()});
  ASSERT_EQ(from_file.code, kExitOk) << from_file.err;
  EXPECT_EQ(max_abs_rel_diff(load_tensor(a), load_tensor(b)), 0.0);

  WeightContainer c = load_weight_file(w);
  c.manifest[2].name = "renamed";
  save_weight_file(w, c);
  const Invocation bad = cmd({"infer"}, {"--weights", w.string(), "--input-seed", "5", "--out", a.string()});
  EXPECT_EQ(bad.code, kExitData);
  EXPECT_NE(bad.err.find("name"), std::string::npos);
  EXPECT_EQ(cmd({"infer"}, {"--weights", "/nonexistent.bwgt", "--input-seed", "5", "--out",
                            a.string()})
                .code,
            kExitData);
  for (const auto& p : {w, a, b}) fs::remove(p);
}

TEST(Cli, MemoryPlanRows) {
  const Invocation r = run_cli({"memory-plan", "--format", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["max_row_bytes"], 200704u);
  EXPECT_EQ(j["rows"].size(), 6u);
  EXPECT_EQ(j["act_bits"], 16u);

  const auto wide = nlohmann::json::parse(
      run_cli({"memory-plan", "--act-bits", "32", "--format", "json"}).out);
  for (std::size_t i = 0; i < j["rows"].size(); ++i) {
    EXPECT_EQ(wide["rows"][i]["bytes"].get<std::uint64_t>(),
              2 * j["rows"][i]["bytes"].get<std::uint64_t>());
  }
  const auto split = nlohmann::json::parse(
      run_cli({"memory-plan", "--split", "5", "--format", "json"}).out);
  EXPECT_LT(split["first_block_cascade_peak_bytes"].get<std::uint64_t>(),
            j["first_block_cascade_peak_bytes"].get<std::uint64_t>());
  EXPECT_EQ(run_cli({"memory-plan", "--act-bits", "8"}).code, kExitUsage);

  const auto off = nlohmann::json::parse(
      run_cli({"memory-plan", "--no-first-layer-trick", "--format", "json"}).out);
  EXPECT_FALSE(off["first_layer_trick"].get<bool>());
  EXPECT_EQ(off["rows"][0]["max_channels"], 32u);
}

TEST(Cli, MemoryPlanGraphDump) {
  const auto path = temp("graph.jsonl");
  ASSERT_EQ(run_cli({"memory-plan", "--graph-out", path.string()}).code, kExitOk);
  std::ifstream in(path);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line); ++lines) {
    EXPECT_TRUE(nlohmann::json::accept(line));
  }
  EXPECT_EQ(lines, 22u + 21u);
  fs::remove(path);
}

TEST(Cli, CollapseGolden) {
  const Invocation r = run_cli({"theory", "collapse", "--n", "2", "--m", "4", "--trials", "100000",
                         "--seed", "3", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out,
            "# btn theory collapse seed=3 n=2 m=4 trials=100000\n"
            "n,m,trials,preserved,fraction,expected,standard_error,bound\n"
            "2,4,100000,68567,0.68567,0.6875,0.0014657549249448218,0.75\n");
  EXPECT_EQ(run_cli({"theory", "collapse", "--n", "4", "--m", "3"}).code, kExitUsage);
}

TEST(Cli, SpiralRatio) {
  const Invocation r = run_cli({"theory", "spiral", "--dims", "2,30", "--seed", "9", "--out", "json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["seed"], 9u);
  EXPECT_GE(j["rows"][0]["error"].get<double>(), 10 * j["rows"][1]["error"].get<double>());
  EXPECT_EQ(run_cli({"theory", "spiral", "--dims", "1,2"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"theory", "spiral", "--readback", "magic"}).code, kExitUsage);
}

TEST(Cli, ActivationsSmall) {
  const Invocation r = run_cli({"theory", "activations", "--alpha", "0.35", "--res", "96", "--batch",
                         "2", "--seed", "5", "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("# btn theory activations seed=5", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2 + 35);
  EXPECT_EQ(run_cli({"theory", "activations", "--aggregation", "median"}).code, kExitUsage);
}

}  // namespace
}  // namespace btn::cli
