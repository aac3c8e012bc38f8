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

#include "fairthresh/cli/run_config.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/core.h>
#include <yaml-cpp/yaml.h>

#include "fairthresh/error.h"

namespace fairthresh::cli {
namespace {

void RejectUnknownKeys(const YAML::Node& section, std::string_view name,
                       const std::set<std::string>& allowed) {
  if (!section.IsMap()) {
    throw ValidationError(fmt::format("config: '{}' must be a mapping", name));
  }
  for (const auto& entry : section) {
    const auto key = entry.first.as<std::string>();
    if (!allowed.contains(key)) {
      throw ValidationError(
          fmt::format("config: unknown key '{}' in section '{}'", key, name));
    }
  }
}

template <typename T>
void Read(const YAML::Node& section, const char* key, T* out) {
  if (const YAML::Node node = section[key]; node && !node.IsNull()) {
    try {
      *out = node.as<T>();
    } catch (const YAML::Exception&) {
      throw ValidationError(
          fmt::format("config: bad value for '{}' (line {})", key,
                      node.Mark().line + 1));
    }
  }
}

template <typename T>
void ReadOptional(const YAML::Node& section, const char* key,
                  std::optional<T>* out) {
  if (const YAML::Node node = section[key]; node && !node.IsNull()) {
    T value;
    Read(section, key, &value);
    *out = std::move(value);
  }
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() || base.empty() ? p : base / p;
}

BetaParams ReadBeta(const YAML::Node& node, std::string_view what) {
  if (!node || !node.IsSequence() || node.size() != 2) {
    throw ValidationError(fmt::format(
        "config: synthetic '{}' must be a two-element list [a, b]", what));
  }
  return {node[0].as<double>(), node[1].as<double>()};
}

void ReadSynthetic(const YAML::Node& section, RunConfig* config) {
  RejectUnknownKeys(section, "synthetic", {"groups"});
  const YAML::Node groups = section["groups"];
  if (!groups) return;
  if (!groups.IsSequence()) {
    throw ValidationError("config: synthetic.groups must be a list");
  }
  for (const auto& node : groups) {
    RejectUnknownKeys(node, "synthetic.groups[]",
                      {"attributes", "n_human", "n_ai", "human", "ai"});
    std::vector<GroupKey::Part> parts;
    if (const YAML::Node attrs = node["attributes"]) {
      for (const auto& attr : attrs) {
        parts.emplace_back(attr.first.as<std::string>(),
                           attr.second.as<std::string>());
      }
    }
    SyntheticGroupSpec spec;
    spec.key = GroupKey(std::move(parts));
    const auto count = [&](const char* key) -> std::size_t {
      long long value = 0;
      Read(node, key, &value);
      if (value < 0) {
        throw ValidationError(
            fmt::format("config: synthetic {} must be >= 0", key));
      }
      return static_cast<std::size_t>(value);
    };
    spec.n_human = count("n_human");
    spec.n_ai = count("n_ai");
    spec.human = ReadBeta(node["human"], "human");
    spec.ai = ReadBeta(node["ai"], "ai");
    config->synthetic.push_back(std::move(spec));
  }
}

RunConfig FromYaml(const YAML::Node& root,
                   const std::filesystem::path& base_dir) {
  RunConfig config;
  if (!root || root.IsNull()) return config;
  RejectUnknownKeys(root, "<root>",
                    {"ingest", "grouping", "evaluation", "optimizer",
                     "baseline", "analysis", "sweep", "synthetic", "io",
                     "seed"});

  if (const YAML::Node s = root["ingest"]) {
    RejectUnknownKeys(s, "ingest",
                      {"score_column", "label_column", "id_column",
                       "attribute_columns", "length_char_column",
                       "length_attribute", "format"});
    Read(s, "score_column", &config.schema.score_column);
    Read(s, "label_column", &config.schema.label_column);
    Read(s, "id_column", &config.schema.id_column);
    Read(s, "attribute_columns", &config.schema.attribute_columns);
    ReadOptional(s, "length_char_column", &config.schema.length_char_column);
    Read(s, "length_attribute", &config.schema.length_attribute);
    std::optional<std::string> format;
    ReadOptional(s, "format", &format);
    if (format) {
      config.format = ParseInputFormat(*format);
      if (!config.format) {
        throw ValidationError(
            fmt::format("config: unknown input format '{}'", *format));
      }
    }
  }
  if (const YAML::Node s = root["grouping"]) {
    RejectUnknownKeys(s, "grouping", {"attributes"});
    Read(s, "attributes", &config.group_attributes);
  }
  if (const YAML::Node s = root["evaluation"]) {
    RejectUnknownKeys(s, "evaluation", {"attributes"});
    Read(s, "attributes", &config.eval_attributes);
  }
  if (const YAML::Node s = root["optimizer"]) {
    RejectUnknownKeys(
        s, "optimizer",
        {"theta_init", "learning_rate", "max_iterations", "fd_step",
         "acc_floor", "f1_floor", "penalty_weight", "fairness_gap",
         "fairness_metrics", "clip_lower", "clip_upper", "tol",
         "stagnation_patience", "relaxed_ratio", "trace_stride"});
    OptimizerConfig& o = config.optimizer;
    Read(s, "theta_init", &o.theta_init);
    Read(s, "learning_rate", &o.learning_rate);
    Read(s, "max_iterations", &o.max_iterations);
    Read(s, "fd_step", &o.fd_step);
    Read(s, "acc_floor", &o.acc_floor);
    Read(s, "f1_floor", &o.f1_floor);
    Read(s, "penalty_weight", &o.penalty_weight);
    Read(s, "fairness_gap", &o.fairness_gap);
    Read(s, "clip_lower", &o.clip_lower);
    Read(s, "clip_upper", &o.clip_upper);
    Read(s, "tol", &o.tol);
    Read(s, "stagnation_patience", &o.stagnation_patience);
    Read(s, "relaxed_ratio", &o.relaxed_ratio);
    Read(s, "trace_stride", &o.trace_stride);
    std::optional<std::vector<std::string>> metrics;
    ReadOptional(s, "fairness_metrics", &metrics);
    if (metrics) {
      o.fairness_metrics.clear();
      for (const auto& name : *metrics) {
        const auto metric = ParseFairnessMetric(name);
        if (!metric) {
          throw ValidationError(
              fmt::format("config: unknown fairness metric '{}'", name));
        }
        o.fairness_metrics.push_back(*metric);
      }
    }
  }
  if (const YAML::Node s = root["baseline"]) {
    RejectUnknownKeys(s, "baseline", {"static_value", "fpr_cap"});
    Read(s, "static_value", &config.static_value);
    Read(s, "fpr_cap", &config.fpr_cap);
  }
  if (const YAML::Node s = root["analysis"]) {
    RejectUnknownKeys(s, "analysis", {"min_group_size"});
    Read(s, "min_group_size", &config.min_group_size);
  }
  if (const YAML::Node s = root["sweep"]) {
    RejectUnknownKeys(s, "sweep", {"schedule"});
    Read(s, "schedule", &config.schedule);
  }
  if (const YAML::Node s = root["synthetic"]) ReadSynthetic(s, &config);
  if (const YAML::Node s = root["io"]) {
    RejectUnknownKeys(s, "io", {"train", "test", "output"});
    std::optional<std::string> path;
    ReadOptional(s, "train", &path);
    if (path) config.train_path = Resolve(base_dir, *path);
    path.reset();
    ReadOptional(s, "test", &path);
    if (path) config.test_path = Resolve(base_dir, *path);
    path.reset();
    ReadOptional(s, "output", &path);
    if (path) config.output_path = Resolve(base_dir, *path);
  }
  Read(root, "seed", &config.seed);
  return config;
}

}  // namespace

std::vector<std::string> RunConfig::GroupAttributes() const {
  return group_attributes.empty() ? schema.AttributeNames() : group_attributes;
}

std::vector<std::string> RunConfig::EvalAttributes() const {
  return eval_attributes.empty() ? GroupAttributes() : eval_attributes;
}

void RunConfig::Validate() const {
  schema.Validate();
  optimizer.Validate();
  if (!(static_value >= 0.0 && static_value <= 1.0)) {
    throw ValidationError(
        fmt::format("config: static_value {} outside [0,1]", static_value));
  }
  if (!(fpr_cap >= 0.0 && fpr_cap <= 1.0)) {
    throw ValidationError(
        fmt::format("config: fpr_cap {} outside [0,1]", fpr_cap));
  }
  const std::vector<std::string> known = schema.AttributeNames();
  const auto check = [&](const std::vector<std::string>& names,
                         std::string_view what) {
    for (const auto& name : names) {
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw ValidationError(fmt::format(
            "config: {} attribute '{}' is not a schema attribute", what, name));
      }
    }
  };
  check(group_attributes, "grouping");
  check(eval_attributes, "evaluation");
  for (const double budget : schedule) {
    if (!(budget >= 0.0)) {
      throw ValidationError(
          fmt::format("config: sweep budget {} must be >= 0", budget));
    }
  }
}

RunConfig ParseRunConfig(const std::string& yaml,
                         const std::filesystem::path& base_dir) {
  try {
    return FromYaml(YAML::Load(yaml), base_dir);
  } catch (const YAML::Exception& e) {
    throw ValidationError(fmt::format("config: {}", e.what()));
  }
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream input(path);
  if (!input) {
    throw ValidationError(
        fmt::format("cannot open config file '{}'", path.string()));
  }
  std::stringstream buffer;
  buffer << input.rdbuf();
  try {
    return ParseRunConfig(buffer.str(), path.parent_path());
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace fairthresh::cli
