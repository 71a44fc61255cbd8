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

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "btn/architecture.hpp"
#include "btn/compute_graph.hpp"
#include "btn/cost_model.hpp"
#include "btn/error.hpp"
#include "btn/memory_planner.hpp"
#include "btn/tensor_io.hpp"
#include "btn/theory_lab.hpp"
#include "btn/weights.hpp"

namespace btn::cli {
namespace {

using nlohmann::ordered_json;

// Flag-level validation failure; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, r.ptr);
}

std::string millions(std::uint64_t v) { return fixed(static_cast<double>(v) / 1e6, 2) + "M"; }

std::string kilobytes(std::uint64_t v) { return fixed(static_cast<double>(v) / 1e3, 2); }

class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out) const {
    std::vector<std::size_t> width(header_.size(), 0);
    auto measure = [&](const std::vector<std::string>& row) {
      for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    };
    measure(header_);
    for (const auto& r : rows_) measure(r);
    auto line = [&](const std::vector<std::string>& row) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << "  ";
        if (i == 0) {
          out << std::left << std::setw(static_cast<int>(width[i])) << row[i];
        } else {
          out << std::right << std::setw(static_cast<int>(width[i])) << row[i];
        }
      }
      out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void csv_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
  out << '\n';
}

ModelSpec spec_from(const RunConfig& cfg) {
  ModelSpec spec;
  spec.width_multiplier = cfg.alpha;
  spec.input_resolution = cfg.resolution;
  spec.num_classes = cfg.classes;
  spec.validate();
  return spec;
}

std::string header_line(const std::string& command, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string s = "# btn " + command;
  for (const auto& [k, v] : kv) s += " " + k + "=" + v;
  return s;
}

// ---------------------------------------------------------------- summarize

ordered_json cost_json(const RunConfig& cfg, const CostReport& report) {
  ordered_json j;
  j["command"] = "summarize";
  j["width_multiplier"] = report.width_multiplier;
  j["input_resolution"] = report.input_resolution;
  j["num_classes"] = cfg.classes;
  ordered_json layers = ordered_json::array();
  for (const CostRow& r : report.rows) {
    ordered_json row;
    row["name"] = r.name;
    row["kind"] = layer_kind_name(r.kind);
    row["out_height"] = r.out_height;
    row["out_width"] = r.out_width;
    row["out_channels"] = r.out_channels;
    row["madds"] = r.madds;
    row["params"] = r.params;
    row["bn_params"] = r.bn_params;
    layers.push_back(row);
  }
  j["layers"] = layers;
  ordered_json totals;
  totals["madds"] = report.total_madds;
  totals["params"] = report.total_params;
  totals["bn_params"] = report.total_bn_params;
  totals["params_with_batchnorm"] = report.params_with_batchnorm();
  totals["classifier_madds"] = report.classifier_madds;
  totals["classifier_params"] = report.classifier_params;
  j["totals"] = totals;
  return j;
}

}  // namespace

int cmd_summarize(const RunConfig& cfg, std::ostream& out) {
  const CostReport report = model_cost(spec_from(cfg));
  switch (cfg.format) {
    case Format::kJson:
      out << cost_json(cfg, report).dump(2) << '\n';
      break;
    case Format::kCsv:
      out << header_line("summarize", {{"alpha", num(cfg.alpha)},
                                       {"res", std::to_string(cfg.resolution)},
                                       {"classes", std::to_string(cfg.classes)}})
          << '\n';
      csv_line(out, {"name", "kind", "out_height", "out_width", "out_channels", "madds",
                     "params", "bn_params"});
      for (const CostRow& r : report.rows) {
        csv_line(out, {r.name, layer_kind_name(r.kind), std::to_string(r.out_height),
                       std::to_string(r.out_width), std::to_string(r.out_channels),
                       std::to_string(r.madds), std::to_string(r.params),
                       std::to_string(r.bn_params)});
      }
      csv_line(out, {"total", "", "", "", "", std::to_string(report.total_madds),
                     std::to_string(report.total_params), std::to_string(report.total_bn_params)});
      break;
    case Format::kTable: {
      out << "MobileNetV2 alpha=" << num(cfg.alpha) << " res=" << cfg.resolution
          << " classes=" << cfg.classes << "\n\n";
      TextTable table({"layer", "kind", "output", "MAdds", "params"});
      for (const CostRow& r : report.rows) {
        table.add({r.name, layer_kind_name(r.kind),
                   std::to_string(r.out_height) + "x" + std::to_string(r.out_width) + "x" +
                       std::to_string(r.out_channels),
                   std::to_string(r.madds), std::to_string(r.params)});
      }
      table.print(out);
      out << "\nMAdds:  " << report.total_madds << " (" << millions(report.total_madds) << ")\n"
          << "Params: " << report.total_params << " (" << millions(report.total_params)
          << ", folded biases)\n"
          << "Params with batch-norm scale and offset: " << report.params_with_batchnorm()
          << " (" << millions(report.params_with_batchnorm()) << ")\n"
          << "Classifier: " << report.classifier_madds << " MAdds, "
          << report.classifier_params << " params\n";
      break;
    }
  }
  return kExitOk;
}

// -------------------------------------------------------------------- infer

namespace {

Model model_for(const RunConfig& cfg) {
  const ModelSpec spec = spec_from(cfg);
  if (!cfg.weights_path.empty()) {
    return load_weights(build_model(spec), load_weight_file(cfg.weights_path));
  }
  return build_model(spec, WeightInit::kRandom, cfg.seed);
}

struct Ranked {
  std::size_t index;
  float logit;
};

std::vector<Ranked> top_k(std::span<const float> logits, std::size_t k) {
  std::vector<std::size_t> order(logits.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return logits[a] != logits[b] ? logits[a] > logits[b] : a < b;
                    });
  std::vector<Ranked> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back({order[i], logits[order[i]]});
  return out;
}

}  // namespace

int cmd_infer(const RunConfig& cfg, std::ostream& out) {
  if (cfg.weights_path.empty() == !cfg.random_weights) {
    throw UsageError("infer: pass exactly one of --weights or --random-weights");
  }
  if (cfg.input_path.empty() && !cfg.input_seed_set) {
    throw UsageError("infer: pass --input or --input-seed");
  }
  if (!cfg.input_path.empty() && cfg.input_seed_set) {
    throw UsageError("infer: --input and --input-seed are exclusive");
  }
  if (cfg.out_path.empty()) throw UsageError("infer: --out is required");
  const Model model = model_for(cfg);

  std::optional<Tensor> input;
  if (!cfg.input_path.empty()) {
    input = load_tensor(cfg.input_path);
    const Shape& s = input->shape();
    if (s.height != cfg.resolution || s.width != cfg.resolution || s.channels != 3) {
      throw UsageError("infer: input " + to_string(s) + " does not match --res " +
                       std::to_string(cfg.resolution) + " with 3 channels");
    }
  } else {
    Rng rng(cfg.input_seed);
    input = tensor_random_gaussian({1, cfg.resolution, cfg.resolution, 3}, rng, 0.0f, 1.0f);
  }

  ForwardOptions options;
  options.split = cfg.split;
  const Tensor logits = forward(model, *input, options);
  save_tensor(cfg.out_path, logits);

  const std::size_t classes = logits.shape().channels;
  std::vector<std::vector<Ranked>> tops;
  for (std::size_t b = 0; b < logits.shape().batch; ++b) {
    tops.push_back(top_k(logits.data().subspan(b * classes, classes), 5));
  }

  const std::string weights = cfg.random_weights ? "random" : cfg.weights_path;
  const std::string source = cfg.input_path.empty() ? "random" : cfg.input_path;
  switch (cfg.format) {
    case Format::kJson: {
      ordered_json j;
      j["command"] = "infer";
      j["width_multiplier"] = cfg.alpha;
      j["input_resolution"] = cfg.resolution;
      j["weights"] = weights;
      if (cfg.random_weights) j["seed"] = cfg.seed;
      j["input"] = source;
      if (cfg.input_seed_set) j["input_seed"] = cfg.input_seed;
      j["split"] = cfg.split;
      j["output"] = cfg.out_path;
      ordered_json all = ordered_json::array();
      for (const auto& top : tops) {
        ordered_json items = ordered_json::array();
        for (const Ranked& r : top) items.push_back({{"index", r.index}, {"logit", r.logit}});
        all.push_back(items);
      }
      j["top5"] = all;
      out << j.dump(2) << '\n';
      break;
    }
    case Format::kCsv:
    case Format::kTable: {
      std::vector<std::pair<std::string, std::string>> kv{
          {"alpha", num(cfg.alpha)}, {"res", std::to_string(cfg.resolution)},
          {"weights", weights}};
      if (cfg.random_weights) kv.emplace_back("seed", std::to_string(cfg.seed));
      kv.emplace_back("input", source);
      if (cfg.input_seed_set) kv.emplace_back("input_seed", std::to_string(cfg.input_seed));
      kv.emplace_back("split", std::to_string(cfg.split));
      out << header_line("infer", kv) << '\n';
      csv_line(out, {"image", "rank", "index", "logit"});
      for (std::size_t b = 0; b < tops.size(); ++b) {
        for (std::size_t r = 0; r < tops[b].size(); ++r) {
          csv_line(out, {std::to_string(b), std::to_string(r + 1),
                         std::to_string(tops[b][r].index), num(tops[b][r].logit)});
        }
      }
      break;
    }
  }
  return kExitOk;
}

int cmd_init_weights(const RunConfig& cfg, std::ostream& out) {
  if (cfg.out_path.empty()) throw UsageError("init-weights: --out is required");
  const Model model = build_model(spec_from(cfg), WeightInit::kRandom, cfg.seed);
  const WeightContainer container = save_weights(model);
  save_weight_file(cfg.out_path, container);
  out << header_line("init-weights", {{"alpha", num(cfg.alpha)},
                                      {"res", std::to_string(cfg.resolution)},
                                      {"seed", std::to_string(cfg.seed)}})
      << '\n'
      << "entries," << container.manifest.size() << "\nfloats," << container.payload.size()
      << '\n';
  return kExitOk;
}

// -------------------------------------------------------------- memory-plan

int cmd_memory_plan(const RunConfig& cfg, std::ostream& out) {
  if (cfg.act_bits != 16 && cfg.act_bits != 32) {
    throw UsageError("--act-bits must be 16 or 32");
  }
  if (cfg.split == 0) throw UsageError("--split must be at least 1");
  const ModelSpec spec = spec_from(cfg);
  MemoryTableOptions options;
  options.bytes_per_element = cfg.act_bits / 8;
  options.first_layer_trick = cfg.first_layer_trick;
  options.split = cfg.split;
  const MemoryReport report = memory_table(spec, options);
  const ComputeGraph graph = model_block_graph(spec, options.bytes_per_element, cfg.split);
  const std::uint64_t linear = linear_bound_memory(graph);
  if (!cfg.graph_out.empty()) {
    std::ofstream file(cfg.graph_out, std::ios::binary);
    if (!file) throw Error(Errc::kIo, "cannot open " + cfg.graph_out);
    write_graph_jsonl(file, graph);
  }

  switch (cfg.format) {
    case Format::kJson: {
      ordered_json j;
      j["command"] = "memory-plan";
      j["width_multiplier"] = cfg.alpha;
      j["input_resolution"] = cfg.resolution;
      j["act_bits"] = cfg.act_bits;
      j["split"] = cfg.split;
      j["first_layer_trick"] = cfg.first_layer_trick;
      ordered_json rows = ordered_json::array();
      for (const ResolutionRow& r : report.rows) {
        ordered_json row;
        row["resolution"] = r.resolution;
        row["max_channels"] = r.max_channels;
        row["bytes"] = r.bytes;
        row["kilobytes"] = static_cast<double>(r.bytes) / 1e3;
        row["io_bytes"] = r.io_bytes;
        row["streamed"] = r.streamed;
        rows.push_back(row);
      }
      j["rows"] = rows;
      j["max_row_bytes"] = report.max_row_bytes;
      j["schedule_peak_bytes"] = report.peak_bytes;
      j["linear_bound_bytes"] = linear;
      j["first_block_cascade_peak_bytes"] = report.first_block_cascade_peak;
      out << j.dump(2) << '\n';
      break;
    }
    case Format::kCsv:
      out << header_line("memory-plan",
                         {{"alpha", num(cfg.alpha)},
                          {"res", std::to_string(cfg.resolution)},
                          {"act_bits", std::to_string(cfg.act_bits)},
                          {"split", std::to_string(cfg.split)},
                          {"first_layer_trick", cfg.first_layer_trick ? "1" : "0"}})
          << '\n';
      csv_line(out, {"resolution", "max_channels", "bytes", "io_bytes", "streamed"});
      for (const ResolutionRow& r : report.rows) {
        csv_line(out, {std::to_string(r.resolution), std::to_string(r.max_channels),
                       std::to_string(r.bytes), std::to_string(r.io_bytes),
                       r.streamed ? "1" : "0"});
      }
      csv_line(out, {"max", "", std::to_string(report.max_row_bytes), "", ""});
      out << "# schedule_peak_bytes=" << report.peak_bytes
          << " linear_bound_bytes=" << linear
          << " first_block_cascade_peak_bytes=" << report.first_block_cascade_peak << '\n';
      break;
    case Format::kTable: {
      out << "Max materialized activations, alpha=" << num(cfg.alpha)
          << " res=" << cfg.resolution << ", " << cfg.act_bits << "-bit\n\n";
      TextTable table({"size", "channels", "kB", "in+out kB", "note"});
      for (const ResolutionRow& r : report.rows) {
        table.add({std::to_string(r.resolution) + "x" + std::to_string(r.resolution),
                   std::to_string(r.max_channels), kilobytes(r.bytes), kilobytes(r.io_bytes),
                   r.streamed ? "streamed" : ""});
      }
      table.add({"max", "", kilobytes(report.max_row_bytes), "", ""});
      table.print(out);
      out << "\nBlock-graph schedule peak: " << kilobytes(report.peak_bytes) << " kB"
          << " (linear bound " << kilobytes(linear) << " kB)\n"
          << "First block cascade peak, split " << cfg.split << ": "
          << kilobytes(report.first_block_cascade_peak) << " kB\n";
      break;
    }
  }
  return kExitOk;
}

// ------------------------------------------------------------------- theory

namespace {

int theory_collapse(const RunConfig& cfg, std::ostream& out) {
  if (cfg.n == 0) throw UsageError("--n must be at least 1");
  if (cfg.m < cfg.n) throw UsageError("--m must be >= --n");
  if (cfg.trials == 0) throw UsageError("--trials must be at least 1");
  const CollapseResult r = collapse_fraction_mc(cfg.n, cfg.m, cfg.trials, cfg.seed);
  const double bound = collapse_bound(cfg.m);
  if (cfg.format == Format::kJson) {
    ordered_json j;
    j["command"] = "theory collapse";
    j["seed"] = r.seed;
    j["n"] = r.n;
    j["m"] = r.m;
    j["trials"] = r.trials;
    j["preserved"] = r.preserved;
    j["fraction"] = r.fraction;
    j["expected"] = r.expected;
    j["standard_error"] = r.standard_error;
    j["bound"] = bound;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << header_line("theory collapse", {{"seed", std::to_string(r.seed)},
                                         {"n", std::to_string(r.n)},
                                         {"m", std::to_string(r.m)},
                                         {"trials", std::to_string(r.trials)}})
      << '\n';
  csv_line(out, {"n", "m", "trials", "preserved", "fraction", "expected", "standard_error",
                 "bound"});
  csv_line(out, {std::to_string(r.n), std::to_string(r.m), std::to_string(r.trials),
                 std::to_string(r.preserved), num(r.fraction), num(r.expected),
                 num(r.standard_error), num(bound)});
  return kExitOk;
}

SpiralReadback parse_readback(const std::string& s) {
  if (s == "active-rows") return SpiralReadback::kActiveRows;
  if (s == "pseudo-inverse") return SpiralReadback::kPseudoInverse;
  throw UsageError("--readback must be active-rows or pseudo-inverse");
}

int theory_spiral(const RunConfig& cfg, std::ostream& out) {
  if (cfg.dims.empty()) throw UsageError("--dims needs at least one value");
  for (std::size_t d : cfg.dims) {
    if (d < 2) throw UsageError("--dims values must be >= 2");
  }
  if (cfg.points < 2) throw UsageError("--points must be at least 2");
  SpiralOptions options;
  options.points = cfg.points;
  options.readback = parse_readback(cfg.readback);
  const auto rows = spiral_experiment(cfg.dims, cfg.seed, options);
  if (cfg.format == Format::kJson) {
    ordered_json j;
    j["command"] = "theory spiral";
    j["seed"] = cfg.seed;
    j["points"] = options.points;
    j["turns"] = options.turns;
    j["readback"] = spiral_readback_name(options.readback);
    ordered_json items = ordered_json::array();
    for (const SpiralRow& r : rows) items.push_back({{"dims", r.dims}, {"error", r.error}});
    j["rows"] = items;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << header_line("theory spiral", {{"seed", std::to_string(cfg.seed)},
                                       {"points", std::to_string(options.points)},
                                       {"turns", num(options.turns)},
                                       {"readback", spiral_readback_name(options.readback)}})
      << '\n';
  csv_line(out, {"dims", "error"});
  for (const SpiralRow& r : rows) csv_line(out, {std::to_string(r.dims), num(r.error)});
  return kExitOk;
}

int theory_activations(const RunConfig& cfg, std::ostream& out) {
  if (cfg.batch == 0) throw UsageError("--batch must be at least 1");
  ActivationAggregation aggregation;
  if (cfg.aggregation == "per-location") {
    aggregation = ActivationAggregation::kPerLocation;
  } else if (cfg.aggregation == "per-feature-map-any") {
    aggregation = ActivationAggregation::kPerFeatureMapAny;
  } else {
    throw UsageError("--aggregation must be per-location or per-feature-map-any");
  }
  if (cfg.init != "batchnorm" && cfg.init != "raw") {
    throw UsageError("--init must be batchnorm or raw");
  }
  const ModelSpec spec = spec_from(cfg);
  const Shape shape{cfg.batch, cfg.resolution, cfg.resolution, 3};
  Model model = model_for(cfg);
  const bool calibrate = cfg.weights_path.empty() && cfg.init == "batchnorm";
  if (calibrate) {
    Rng rng(cfg.seed + 1);
    calibrate_batchnorm(
        model, tensor_random_gaussian({8, cfg.resolution, cfg.resolution, 3}, rng, 0.0f, 1.0f));
  }
  Rng rng(cfg.seed + 2);
  const Tensor batch = tensor_random_gaussian(shape, rng, 0.0f, 1.0f);
  const ActivationStats stats = activation_pattern_stats(model, batch, aggregation);

  const std::string weights = cfg.weights_path.empty() ? "random" : cfg.weights_path;
  const std::string init = cfg.weights_path.empty() ? cfg.init : "file";
  if (cfg.format == Format::kJson) {
    ordered_json j;
    j["command"] = "theory activations";
    j["seed"] = cfg.seed;
    j["width_multiplier"] = cfg.alpha;
    j["input_resolution"] = cfg.resolution;
    j["weights"] = weights;
    j["init"] = init;
    j["batch"] = stats.batch;
    j["aggregation"] = activation_aggregation_name(stats.aggregation);
    ordered_json layers = ordered_json::array();
    for (const auto& l : stats.layers) {
      ordered_json row;
      row["index"] = l.index;
      row["name"] = l.name;
      row["channels"] = l.channels;
      row["threshold"] = l.threshold;
      row["min_positive"] = l.min_positive;
      row["mean_positive"] = l.mean_positive;
      row["max_positive"] = l.max_positive;
      row["mean_fraction"] = l.mean_fraction();
      layers.push_back(row);
    }
    j["layers"] = layers;
    out << j.dump(2) << '\n';
    return kExitOk;
  }
  out << header_line("theory activations",
                     {{"seed", std::to_string(cfg.seed)},
                      {"alpha", num(cfg.alpha)},
                      {"res", std::to_string(cfg.resolution)},
                      {"weights", weights},
                      {"init", init},
                      {"batch", std::to_string(stats.batch)},
                      {"aggregation", activation_aggregation_name(stats.aggregation)}})
      << '\n';
  if (cfg.format == Format::kCsv) {
    csv_line(out, {"index", "name", "channels", "threshold", "min_positive", "mean_positive",
                   "max_positive", "mean_fraction"});
    for (const auto& l : stats.layers) {
      csv_line(out, {std::to_string(l.index), l.name, std::to_string(l.channels),
                     std::to_string(l.threshold), num(l.min_positive), num(l.mean_positive),
                     num(l.max_positive), num(l.mean_fraction())});
    }
    return kExitOk;
  }
  TextTable table({"layer", "channels", "threshold", "min", "mean", "max", "fraction"});
  for (const auto& l : stats.layers) {
    table.add({l.name, std::to_string(l.channels), std::to_string(l.threshold),
               fixed(l.min_positive, 0), fixed(l.mean_positive, 2), fixed(l.max_positive, 0),
               fixed(l.mean_fraction(), 3)});
  }
  table.print(out);
  return kExitOk;
}

}  // namespace

int cmd_theory(const RunConfig& cfg, std::ostream& out) {
  if (cfg.theory_command == "collapse") return theory_collapse(cfg, out);
  if (cfg.theory_command == "spiral") return theory_spiral(cfg, out);
  if (cfg.theory_command == "activations") return theory_activations(cfg, out);
  throw UsageError("theory: expected collapse, spiral or activations");
}

// ------------------------------------------------------------------ parsing

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument:
      return kExitUsage;
    case Errc::kFormat:
    case Errc::kIo:
    case Errc::kNameMismatch:
    case Errc::kShapeMismatch:
    case Errc::kPayloadLength:
    case Errc::kChannelMismatch:
    case Errc::kInvalidShape:
      return kExitData;
    default:
      return kExitInternal;
  }
}

void add_format(CLI::App* app, RunConfig& cfg) {
  const std::map<std::string, Format> formats{
      {"table", Format::kTable}, {"csv", Format::kCsv}, {"json", Format::kJson}};
  app->add_option("--format", cfg.format, "Output format: table, csv or json")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
}

void add_model(CLI::App* app, RunConfig& cfg) {
  app->add_option("--alpha", cfg.alpha, "Width multiplier in [0.35, 1.4]")
      ->check(CLI::Range(kMinWidthMultiplier, kMaxWidthMultiplier));
  app->add_option("--res", cfg.resolution, "Input resolution in [96, 224]")
      ->check(CLI::Range(kMinResolution, kMaxResolution));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"btn: inverted-residual network costs, memory plans and ReLU experiments", "btn"};
  app.require_subcommand(1);

  auto* summarize = app.add_subcommand("summarize", "Per-layer MAdds and parameter counts");
  add_model(summarize, cfg);
  summarize->add_option("--classes", cfg.classes, "Classifier outputs")
      ->check(CLI::PositiveNumber);
  add_format(summarize, cfg);

  auto* infer = app.add_subcommand("infer", "Run a forward pass and write logits");
  add_model(infer, cfg);
  infer->add_option("--classes", cfg.classes, "Classifier outputs")->check(CLI::PositiveNumber);
  infer->add_option("--weights", cfg.weights_path, "BWGT weight container");
  infer->add_flag("--random-weights", cfg.random_weights, "Use seeded random weights");
  infer->add_option("--seed", cfg.seed, "Seed for --random-weights");
  infer->add_option("--input", cfg.input_path, "Input tensor file (NHWC)");
  infer->add_option("--input-seed", cfg.input_seed, "Seed for a N(0,1) input image")
      ->each([&](const std::string&) { cfg.input_seed_set = true; });
  infer->add_option("--split", cfg.split, "Cascade channel groups per block")
      ->check(CLI::PositiveNumber);
  infer->add_option("--out", cfg.out_path, "Output logits tensor file");
  add_format(infer, cfg);

  auto* init = app.add_subcommand("init-weights", "Write seeded random weights");
  add_model(init, cfg);
  init->add_option("--classes", cfg.classes, "Classifier outputs")->check(CLI::PositiveNumber);
  init->add_option("--seed", cfg.seed, "Weight seed");
  init->add_option("--out", cfg.out_path, "Output weight container");

  auto* plan = app.add_subcommand("memory-plan", "Materialized activation memory per resolution");
  add_model(plan, cfg);
  plan->add_option("--split", cfg.split, "Cascade channel groups for the first block");
  plan->add_option("--act-bits", cfg.act_bits, "Activation width: 16 or 32");
  plan->add_flag("--first-layer-trick,!--no-first-layer-trick", cfg.first_layer_trick,
                 "Stream the stem region one channel at a time (default on)");
  plan->add_option("--graph-out", cfg.graph_out, "Write the block graph as JSON lines");
  add_format(plan, cfg);

  auto* theory = app.add_subcommand("theory", "ReLU information-preservation experiments");
  theory->require_subcommand(1);
  auto* collapse = theory->add_subcommand("collapse", "Monte Carlo collapse fraction");
  collapse->add_option("--n", cfg.n, "Input dimension");
  collapse->add_option("--m", cfg.m, "Embedding dimension");
  collapse->add_option("--trials", cfg.trials, "Trials");
  collapse->add_option("--seed", cfg.seed, "Seed; trial i uses seed + i");
  add_format(collapse, cfg);

  auto* spiral = theory->add_subcommand("spiral", "Spiral embed / read-back error per dimension");
  spiral->add_option("--dims", cfg.dims, "Embedding dimensions")->delimiter(',');
  spiral->add_option("--seed", cfg.seed, "Seed for T");
  spiral->add_option("--points", cfg.points, "Spiral points");
  spiral->add_option("--readback", cfg.readback, "active-rows or pseudo-inverse");
  spiral->add_option("--out", cfg.format, "Output format: table, csv or json")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Format>{
              {"table", Format::kTable}, {"csv", Format::kCsv}, {"json", Format::kJson}},
          CLI::ignore_case));
  add_format(spiral, cfg);

  auto* activations =
      theory->add_subcommand("activations", "Positive-channel counts after each ReLU6");
  add_model(activations, cfg);
  activations->add_option("--weights", cfg.weights_path, "BWGT weight container");
  activations->add_option("--seed", cfg.seed,
                          "Weight seed; calibration inputs use seed + 1, the batch seed + 2");
  activations->add_option("--batch", cfg.batch, "Random input images");
  activations->add_option("--aggregation", cfg.aggregation,
                          "per-location or per-feature-map-any");
  activations->add_option("--init", cfg.init,
                          "Random-weight state: batchnorm (step-0 statistics) or raw");
  add_format(activations, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (summarize->parsed()) return cmd_summarize(cfg, out);
    if (infer->parsed()) return cmd_infer(cfg, out);
    if (init->parsed()) return cmd_init_weights(cfg, out);
    if (plan->parsed()) return cmd_memory_plan(cfg, out);
    if (theory->parsed()) {
      for (auto* sub : {collapse, spiral, activations}) {
        if (sub->parsed()) cfg.theory_command = sub->get_name();
      }
      return cmd_theory(cfg, out);
    }
    throw UsageError("no subcommand");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << errc_name(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"btn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace btn::cli
