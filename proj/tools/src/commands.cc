/*
 * Copyright 2026 The fairthresh Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fairthresh/cli/commands.h"

#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "fairthresh/baselines.h"
#include "fairthresh/cli/run_config.h"
#include "fairthresh/error.h"
#include "fairthresh/evaluate.h"
#include "fairthresh/fairopt.h"
#include "fairthresh/ingest.h"
#include "fairthresh/stats.h"
#include "fairthresh/synthetic.h"
#include "fairthresh/threshold_map.h"

namespace fairthresh::cli {
namespace {

namespace fs = std::filesystem;

// Flag values as parsed; each one is applied over the config file only when
// the flag was actually given.
struct Flags {
  std::string config;
  std::string input;
  std::string test;
  std::string output;
  std::string trace_output;
  std::string groups_output;
  std::string maps_dir;
  std::string format;
  std::string method = "fairopt";
  std::uint64_t seed = 0;
  std::vector<std::string> attributes;
  std::vector<std::string> eval_attributes;
  std::vector<std::string> attribute_columns;
  std::vector<std::string> maps;
  std::string score_column;
  std::string label_column;
  std::string length_from;
  std::size_t min_group_size = 0;
  double static_value = 0.0;
  double fpr_cap = 0.0;
  std::vector<double> schedule;
  OptimizerConfig optimizer;
  std::vector<std::string> fairness_metrics;
};

// Deferred "if the flag was given, copy it into the config" actions.
class Overrides {
 public:
  template <typename T>
  CLI::Option* Add(CLI::App* app, const std::string& name, T* flag_value,
                   std::function<void(RunConfig&, const T&)> apply,
                   const std::string& help) {
    CLI::Option* option = app->add_option(name, *flag_value, help);
    actions_.push_back([option, flag_value, apply](RunConfig& config) {
      if (option->count() > 0) apply(config, *flag_value);
    });
    return option;
  }

  void Apply(RunConfig& config) const {
    for (const auto& action : actions_) action(config);
  }

 private:
  std::vector<std::function<void(RunConfig&)>> actions_;
};

void AddCommonFlags(CLI::App* app, Flags* flags, Overrides* overrides) {
  app->add_option("--config", flags->config, "YAML run configuration");
  overrides->Add<std::string>(
      app, "--input", &flags->input,
      [](RunConfig& c, const std::string& v) { c.train_path = v; },
      "Input score file (CSV or JSONL)");
  overrides->Add<std::string>(
      app, "--output", &flags->output,
      [](RunConfig& c, const std::string& v) { c.output_path = v; },
      "Output path (standard output when omitted)");
  overrides->Add<std::uint64_t>(
      app, "--seed", &flags->seed,
      [](RunConfig& c, const std::uint64_t& v) { c.seed = v; }, "Random seed");
  overrides
      ->Add<std::vector<std::string>>(
          app, "--attributes", &flags->attributes,
          [](RunConfig& c, const std::vector<std::string>& v) {
            c.group_attributes = v;
          },
          "Grouping attributes (comma list)")
      ->delimiter(',');
  overrides->Add<std::string>(
      app, "--format", &flags->format,
      [](RunConfig& c, const std::string& v) {
        c.format = ParseInputFormat(v);
        if (!c.format) {
          throw ValidationError(fmt::format("unknown input format '{}'", v));
        }
      },
      "Input format: csv or jsonl (default: from extension)");
  overrides
      ->Add<std::vector<std::string>>(
          app, "--attribute-columns", &flags->attribute_columns,
          [](RunConfig& c, const std::vector<std::string>& v) {
            c.schema.attribute_columns = v;
          },
          "Categorical attribute columns of the input (comma list)")
      ->delimiter(',');
  overrides->Add<std::string>(
      app, "--score-column", &flags->score_column,
      [](RunConfig& c, const std::string& v) { c.schema.score_column = v; },
      "Score column name");
  overrides->Add<std::string>(
      app, "--label-column", &flags->label_column,
      [](RunConfig& c, const std::string& v) { c.schema.label_column = v; },
      "Label column name");
  overrides->Add<std::string>(
      app, "--length-from", &flags->length_from,
      [](RunConfig& c, const std::string& v) {
        c.schema.length_char_column = v;
      },
      "Derive the length attribute from this character-count column");
}

void AddOptimizerFlags(CLI::App* app, Flags* flags, Overrides* overrides) {
  OptimizerConfig* o = &flags->optimizer;
  const auto add_double = [&](const std::string& name, double* value,
                              double OptimizerConfig::*field,
                              const std::string& help) {
    overrides->Add<double>(
        app, name, value,
        [field](RunConfig& c, const double& v) { c.optimizer.*field = v; },
        help);
  };
  const auto add_int = [&](const std::string& name, std::int64_t* value,
                           std::int64_t OptimizerConfig::*field,
                           const std::string& help) {
    overrides->Add<std::int64_t>(
        app, name, value,
        [field](RunConfig& c, const std::int64_t& v) { c.optimizer.*field = v; },
        help);
  };
  add_double("--theta-init", &o->theta_init, &OptimizerConfig::theta_init,
             "Initial threshold of every group");
  add_double("--learning-rate", &o->learning_rate,
             &OptimizerConfig::learning_rate, "Gradient step size");
  add_int("--max-iterations", &o->max_iterations,
          &OptimizerConfig::max_iterations, "Maximum number of sweeps");
  add_double("--fd-step", &o->fd_step, &OptimizerConfig::fd_step,
             "Finite-difference half width");
  add_double("--acc-floor", &o->acc_floor, &OptimizerConfig::acc_floor,
             "Minimum per-group accuracy");
  add_double("--f1-floor", &o->f1_floor, &OptimizerConfig::f1_floor,
             "Minimum per-group F1");
  add_double("--penalty-weight", &o->penalty_weight,
             &OptimizerConfig::penalty_weight, "F1 hinge penalty weight");
  add_double("--delta-fair", &o->fairness_gap, &OptimizerConfig::fairness_gap,
             "Acceptable fairness disparity (inf disables the gate)");
  add_double("--clip-lower", &o->clip_lower, &OptimizerConfig::clip_lower,
             "Lower threshold bound");
  add_double("--clip-upper", &o->clip_upper, &OptimizerConfig::clip_upper,
             "Upper threshold bound");
  add_double("--tol", &o->tol, &OptimizerConfig::tol,
             "Convergence and stagnation tolerance");
  add_int("--patience", &o->stagnation_patience,
          &OptimizerConfig::stagnation_patience,
          "Quiet sweeps before stopping early");
  add_double("--tau", &o->relaxed_ratio, &OptimizerConfig::relaxed_ratio,
             "Relaxed fairness ratio (reported)");
  add_int("--trace-stride", &o->trace_stride, &OptimizerConfig::trace_stride,
          "Record every n-th sweep in the trace");
  overrides
      ->Add<std::vector<std::string>>(
          app, "--fairness-metrics", &flags->fairness_metrics,
          [](RunConfig& c, const std::vector<std::string>& v) {
            c.optimizer.fairness_metrics.clear();
            for (const auto& name : v) {
              const auto metric = ParseFairnessMetric(name);
              if (!metric) {
                throw ValidationError(
                    fmt::format("unknown fairness metric '{}'", name));
              }
              c.optimizer.fairness_metrics.push_back(*metric);
            }
          },
          "Fairness gate metrics: dp, eo (comma list)")
      ->delimiter(',');
}

RunConfig ResolveConfig(const Flags& flags, const Overrides& overrides) {
  RunConfig config =
      flags.config.empty() ? RunConfig{} : LoadRunConfig(flags.config);
  overrides.Apply(config);
  config.Validate();
  return config;
}

std::vector<Record> LoadRecords(const RunConfig& config,
                                const std::optional<fs::path>& path,
                                std::string_view what) {
  if (!path) {
    throw ValidationError(fmt::format("no {} file given", what));
  }
  return ReadRecordsFile(*path, config.schema, config.format);
}

// Writes to `path` when set, otherwise to `fallback`.
void Emit(const std::optional<fs::path>& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (!path) {
    write(fallback);
    return;
  }
  std::ofstream file(*path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw RuntimeError(fmt::format("cannot write '{}'", path->string()));
  }
  write(file);
  if (!file) {
    throw RuntimeError(fmt::format("error writing '{}'", path->string()));
  }
}

int CmdAnalyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const GroupedDataset grouped = GroupedDataset::Partition(
      LoadRecords(config, config.train_path, "input"),
      config.GroupAttributes());
  const std::vector<KsPair> pairs =
      PairwiseDiscrepancy(grouped, config.min_group_size);
  Emit(config.output_path, out,
       [&](std::ostream& os) { WritePairwiseCsv(os, pairs); });
  std::ostream& summary = config.output_path ? out : err;
  fmt::print(summary, "groups: {}, pairs: {}\n", grouped.num_groups(),
             pairs.size());
  const KsPair& top = pairs.front();
  fmt::print(summary, "largest discrepancy: {} vs {}: D = {:.4f}, p = {:.3g}\n",
             top.group_a.ToString(), top.group_b.ToString(),
             top.result.statistic, top.result.p_value);
  return kExitOk;
}

int CmdOptimize(const RunConfig& config, const Flags& flags, std::ostream& out,
                std::ostream& err) {
  const auto method = ParseMethod(flags.method);
  if (!method) {
    throw ValidationError(fmt::format(
        "unknown method '{}' (expected static, rocfpr or fairopt)",
        flags.method));
  }
  const GroupedDataset grouped = GroupedDataset::Partition(
      LoadRecords(config, config.train_path, "input"),
      config.GroupAttributes());
  ThresholdMap map;
  std::optional<OptimizerTrace> trace;
  switch (*method) {
    case Method::kStatic: {
      std::vector<GroupKey> keys;
      for (const auto& [key, indices] : grouped.groups()) keys.push_back(key);
      map = StaticThreshold(config.static_value, keys,
                            grouped.attribute_names());
      break;
    }
    case Method::kRocFpr:
      map = RocFprThresholdMap(grouped, config.fpr_cap);
      break;
    case Method::kFairOpt: {
      OptimizeResult result = Optimize(grouped, config.optimizer);
      map = std::move(result.map);
      trace = std::move(result.trace);
      break;
    }
  }
  Emit(config.output_path, out,
       [&](std::ostream& os) { os << RenderThresholdMapJson(map); });
  if (trace) {
    std::optional<fs::path> trace_path;
    if (!flags.trace_output.empty()) {
      trace_path = flags.trace_output;
    } else if (config.output_path) {
      trace_path = *config.output_path;
      trace_path->replace_extension(".trace.csv");
    }
    if (trace_path) {
      Emit(trace_path, out,
           [&](std::ostream& os) { WriteTraceCsv(os, *trace); });
    }
    fmt::print(err, "fairopt: {} groups, {} sweeps, {}\n",
               grouped.num_groups(), trace->iterations,
               TerminationName(trace->reason));
  }
  return kExitOk;
}

int CmdEvaluate(const RunConfig& config, const Flags& flags, std::ostream& out) {
  if (flags.maps.empty()) {
    throw ValidationError("evaluate needs at least one threshold map");
  }
  std::vector<NamedMap> maps;
  for (const auto& path : flags.maps) {
    ThresholdMap map = ReadThresholdMapFile(path);
    maps.push_back({std::string(MethodName(map.method)), std::move(map)});
  }
  const std::optional<fs::path> test_path =
      config.test_path ? config.test_path : config.train_path;
  const std::vector<Record> records = LoadRecords(config, test_path, "test");
  const EvaluationReport report = ComparativeReport(
      records, maps, config.EvalAttributes(), config.group_attributes);
  Emit(config.output_path, out,
       [&](std::ostream& os) { WriteReportCsv(os, report); });
  if (!flags.groups_output.empty()) {
    Emit(fs::path(flags.groups_output), out,
         [&](std::ostream& os) { WriteGroupReportCsv(os, report); });
  }
  return kExitOk;
}

int CmdSweep(const RunConfig& config, const Flags& flags, std::ostream& out,
             std::ostream& err) {
  const GroupedDataset train = GroupedDataset::Partition(
      LoadRecords(config, config.train_path, "training"),
      config.GroupAttributes());
  const std::vector<Record> test =
      LoadRecords(config, config.test_path, "test");
  const std::vector<double> schedule =
      config.schedule.empty() ? DefaultDisparitySchedule() : config.schedule;
  const std::vector<FrontierPoint> points =
      TradeoffSweep(train, test, config.optimizer, schedule);
  Emit(config.output_path, out,
       [&](std::ostream& os) { WriteFrontierCsv(os, points); });
  std::size_t succeeded = 0;
  for (const FrontierPoint& point : points) {
    if (!point.error.empty()) {
      fmt::print(err, "budget {}: {}\n", point.disparity_budget, point.error);
      continue;
    }
    ++succeeded;
    if (!flags.maps_dir.empty()) {
      fs::create_directories(flags.maps_dir);
      WriteThresholdMapFile(
          fs::path(flags.maps_dir) / (point.map_fingerprint + ".json"),
          point.map);
    }
  }
  return succeeded > 0 ? kExitOk : kExitRuntime;
}

int CmdGen(const RunConfig& config, std::ostream& out) {
  if (config.synthetic.empty()) {
    throw ValidationError("gen needs a 'synthetic.groups' config section");
  }
  const std::vector<Record> records =
      GenerateSynthetic(config.synthetic, config.seed);
  std::vector<std::string> attributes;
  for (const auto& group : config.synthetic) {
    for (const auto& [name, category] : group.key.parts()) {
      if (std::find(attributes.begin(), attributes.end(), name) ==
          attributes.end()) {
        attributes.push_back(name);
      }
    }
  }
  std::sort(attributes.begin(), attributes.end());
  const InputFormat format = config.format.value_or(
      config.output_path ? FormatFromPath(*config.output_path)
                         : InputFormat::kCsv);
  Emit(config.output_path, out, [&](std::ostream& os) {
    WriteRecords(os, records, format, attributes, config.schema);
  });
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Group-adaptive decision thresholds for probabilistic binary "
               "classifiers",
               "fairthresh"};
  app.require_subcommand(1);

  Flags flags;
  Overrides overrides;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Pairwise KS discrepancy between subgroup score distributions");
  AddCommonFlags(analyze, &flags, &overrides);
  overrides.Add<std::size_t>(
      analyze, "--min-group-size", &flags.min_group_size,
      [](RunConfig& c, const std::size_t& v) { c.min_group_size = v; },
      "Skip groups smaller than this");

  CLI::App* optimize =
      app.add_subcommand("optimize", "Learn a threshold map from training data");
  AddCommonFlags(optimize, &flags, &overrides);
  AddOptimizerFlags(optimize, &flags, &overrides);
  optimize->add_option("--method", flags.method, "static, rocfpr or fairopt")
      ->capture_default_str();
  optimize->add_option("--trace-output", flags.trace_output,
                       "Trace CSV (default: <output>.trace.csv)");
  overrides.Add<double>(
      optimize, "--static-value", &flags.static_value,
      [](RunConfig& c, const double& v) { c.static_value = v; },
      "Threshold of the static method");
  overrides.Add<double>(
      optimize, "--fpr-cap", &flags.fpr_cap,
      [](RunConfig& c, const double& v) { c.fpr_cap = v; },
      "False positive rate cap of the rocfpr method");

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Compare threshold maps on held-out data");
  AddCommonFlags(evaluate, &flags, &overrides);
  overrides.Add<std::string>(
      evaluate, "--test", &flags.test,
      [](RunConfig& c, const std::string& v) { c.test_path = v; },
      "Test score file (default: --input)");
  overrides
      .Add<std::vector<std::string>>(
          evaluate, "--eval-attributes", &flags.eval_attributes,
          [](RunConfig& c, const std::vector<std::string>& v) {
            c.eval_attributes = v;
          },
          "Attributes for BER discrepancies (comma list)")
      ->delimiter(',');
  evaluate->add_option("--groups-output", flags.groups_output,
                       "Per-group metric table CSV");
  evaluate->add_option("maps", flags.maps, "Threshold map JSON files");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Performance/fairness frontier over disparity budgets");
  AddCommonFlags(sweep, &flags, &overrides);
  AddOptimizerFlags(sweep, &flags, &overrides);
  overrides.Add<std::string>(
      sweep, "--test", &flags.test,
      [](RunConfig& c, const std::string& v) { c.test_path = v; },
      "Test score file");
  overrides
      .Add<std::vector<double>>(
          sweep, "--schedule", &flags.schedule,
          [](RunConfig& c, const std::vector<double>& v) { c.schedule = v; },
          "Disparity budgets (comma list)")
      ->delimiter(',');
  sweep->add_option("--maps-dir", flags.maps_dir,
                    "Write each point's map as <fingerprint>.json here");

  CLI::App* gen = app.add_subcommand(
      "gen", "Generate a synthetic score dataset from the config");
  AddCommonFlags(gen, &flags, &overrides);

  std::vector<std::string> argv_storage = {"fairthresh"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& arg : argv_storage) argv.push_back(arg.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const RunConfig config = ResolveConfig(flags, overrides);
    if (analyze->parsed()) return CmdAnalyze(config, out, err);
    if (optimize->parsed()) return CmdOptimize(config, flags, out, err);
    if (evaluate->parsed()) return CmdEvaluate(config, flags, out);
    if (sweep->parsed()) return CmdSweep(config, flags, out, err);
    if (gen->parsed()) return CmdGen(config, out);
  } catch (const ValidationError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace fairthresh::cli
