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

// Run configuration shared by every fairthresh subcommand, loaded from one
// YAML document with a section per concern. Every key is optional.

#ifndef FAIRTHRESH_CLI_RUN_CONFIG_H_
#define FAIRTHRESH_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairthresh/baselines.h"
#include "fairthresh/fairopt.h"
#include "fairthresh/ingest.h"
#include "fairthresh/stats.h"
#include "fairthresh/synthetic.h"

namespace fairthresh::cli {

struct RunConfig {
  Schema schema;
  std::optional<InputFormat> format;
  // Optimization/partition attributes; empty means every schema attribute.
  std::vector<std::string> group_attributes;
  // BER discrepancy attributes; empty means the group attributes.
  std::vector<std::string> eval_attributes;
  OptimizerConfig optimizer;
  double static_value = kDefaultStaticThreshold;
  double fpr_cap = kDefaultFprCap;
  std::size_t min_group_size = kDefaultMinGroupSize;
  std::vector<double> schedule;
  std::vector<SyntheticGroupSpec> synthetic;
  std::uint64_t seed = 0;

  std::optional<std::filesystem::path> train_path;
  std::optional<std::filesystem::path> test_path;
  std::optional<std::filesystem::path> output_path;

  std::vector<std::string> GroupAttributes() const;
  std::vector<std::string> EvalAttributes() const;
  void Validate() const;
};

// Sections: ingest, grouping, evaluation, optimizer, baseline, analysis,
// sweep, synthetic, io, plus a top-level `seed`. Unknown keys are rejected.
// Relative paths in `io` resolve against the config file's directory.
RunConfig LoadRunConfig(const std::filesystem::path& path);
RunConfig ParseRunConfig(const std::string& yaml,
                         const std::filesystem::path& base_dir = {});

}  // namespace fairthresh::cli

#endif  // FAIRTHRESH_CLI_RUN_CONFIG_H_
