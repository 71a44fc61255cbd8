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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace btn::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitInternal = 4,
};

enum class Format { kTable, kCsv, kJson };

/// Fully parsed flags of one invocation. Fields a subcommand does not use keep
/// their defaults.
struct RunConfig {
  std::string command;
  std::string theory_command;
  double alpha = 1.0;
  std::size_t resolution = 224;
  std::size_t classes = 1000;
  std::uint64_t seed = 0;
  std::uint64_t input_seed = 0;
  bool input_seed_set = false;
  std::size_t split = 1;
  std::size_t act_bits = 16;
  bool first_layer_trick = true;
  Format format = Format::kTable;
  std::string weights_path;
  bool random_weights = false;
  std::string input_path;
  std::string out_path;
  std::string graph_out;
  std::size_t n = 2;
  std::size_t m = 4;
  std::size_t trials = 100000;
  std::vector<std::size_t> dims{2, 3, 15, 30};
  std::size_t points = 1000;
  std::string readback = "active-rows";
  std::size_t batch = 32;
  std::string aggregation = "per-location";
  std::string init = "batchnorm";
};

int cmd_summarize(const RunConfig& cfg, std::ostream& out);
int cmd_infer(const RunConfig& cfg, std::ostream& out);
int cmd_init_weights(const RunConfig& cfg, std::ostream& out);
int cmd_memory_plan(const RunConfig& cfg, std::ostream& out);
int cmd_theory(const RunConfig& cfg, std::ostream& out);

/// Parses argv, dispatches, and maps failures to exit codes. Diagnostics go to
/// err, results to out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace btn::cli
