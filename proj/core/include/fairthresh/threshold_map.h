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

#ifndef FAIRTHRESH_THRESHOLD_MAP_H_
#define FAIRTHRESH_THRESHOLD_MAP_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairthresh {

enum class Method { kStatic, kRocFpr, kFairOpt };

std::string_view MethodName(Method method);
std::optional<Method> ParseMethod(std::string_view name);

// Per-group decision thresholds keyed by serialized GroupKey, plus the
// threshold used for groups that were not seen at training time.
struct ThresholdMap {
  Method method = Method::kStatic;
  // Attributes the keys were built from, in sorted order.
  std::vector<std::string> attributes;
  std::map<std::string, double> thresholds;
  double fallback = 0.5;
  std::string config_fingerprint;

  double ThresholdFor(const std::string& key) const;
  void Validate() const;
};

// {"method": ..., "attributes": [...], "fallback": 0.5000000,
//  "thresholds": {"long_neuroticism": 0.2748645, ...},
//  "config_fingerprint": "..."}
// Thresholds and fallback are rendered with exactly 7 decimals, keys in
// sorted order, so equal maps render byte-identically.
std::string RenderThresholdMapJson(const ThresholdMap& map);
ThresholdMap ParseThresholdMapJson(std::string_view json);

ThresholdMap ReadThresholdMapFile(const std::filesystem::path& path);
void WriteThresholdMapFile(const std::filesystem::path& path,
                           const ThresholdMap& map);

// Fingerprint of the rendered JSON.
std::string MapFingerprint(const ThresholdMap& map);

}  // namespace fairthresh

#endif  // FAIRTHRESH_THRESHOLD_MAP_H_
