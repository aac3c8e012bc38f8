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

#include "fairthresh/threshold_map.h"

#include <cmath>
#include <fstream>
#include <iterator>

#include <fmt/core.h>

#include "fairthresh/error.h"
#include "fairthresh/fingerprint.h"
#include "json.hpp"

namespace fairthresh {
namespace {

using nlohmann::json;

void CheckThreshold(double value, std::string_view what) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ValidationError(
        fmt::format("threshold map: {} = {} is not a valid threshold", what,
                    value));
  }
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kStatic:
      return "static";
    case Method::kRocFpr:
      return "rocfpr";
    case Method::kFairOpt:
      return "fairopt";
  }
  return "unknown";
}

std::optional<Method> ParseMethod(std::string_view name) {
  if (name == "static") return Method::kStatic;
  if (name == "rocfpr") return Method::kRocFpr;
  if (name == "fairopt") return Method::kFairOpt;
  return std::nullopt;
}

double ThresholdMap::ThresholdFor(const std::string& key) const {
  const auto it = thresholds.find(key);
  return it == thresholds.end() ? fallback : it->second;
}

void ThresholdMap::Validate() const {
  CheckThreshold(fallback, "fallback");
  for (const auto& [key, value] : thresholds) {
    CheckThreshold(value, fmt::format("threshold of '{}'", key));
  }
}

std::string RenderThresholdMapJson(const ThresholdMap& map) {
  std::string out = "{\n";
  out += fmt::format("  \"method\": {},\n", json(MethodName(map.method)).dump());
  out += fmt::format("  \"attributes\": {},\n", json(map.attributes).dump());
  out += fmt::format("  \"fallback\": {:.7f},\n", map.fallback);
  if (map.thresholds.empty()) {
    out += "  \"thresholds\": {},\n";
  } else {
    out += "  \"thresholds\": {\n";
    std::size_t i = 0;
    for (const auto& [key, value] : map.thresholds) {
      out += fmt::format("    {}: {:.7f}{}\n", json(key).dump(), value,
                         ++i < map.thresholds.size() ? "," : "");
    }
    out += "  },\n";
  }
  out += fmt::format("  \"config_fingerprint\": {}\n",
                     json(map.config_fingerprint).dump());
  out += "}\n";
  return out;
}

ThresholdMap ParseThresholdMapJson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("threshold map: {}", e.what()));
  }
  try {
    ThresholdMap map;
    const auto method = ParseMethod(doc.at("method").get<std::string>());
    if (!method) {
      throw ValidationError(fmt::format("threshold map: unknown method {}",
                                        doc.at("method").dump()));
    }
    map.method = *method;
    if (doc.contains("attributes")) {
      map.attributes = doc.at("attributes").get<std::vector<std::string>>();
    }
    map.fallback = doc.at("fallback").get<double>();
    for (const auto& [key, value] : doc.at("thresholds").items()) {
      map.thresholds[key] = value.get<double>();
    }
    if (doc.contains("config_fingerprint")) {
      map.config_fingerprint = doc.at("config_fingerprint").get<std::string>();
    }
    map.Validate();
    return map;
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("threshold map: {}", e.what()));
  }
}

ThresholdMap ReadThresholdMapFile(const std::filesystem::path& path) {
  std::ifstream input(path, std::ios::binary);
  if (!input) {
    throw ValidationError(
        fmt::format("cannot open threshold map '{}'", path.string()));
  }
  const std::string text((std::istreambuf_iterator<char>(input)),
                         std::istreambuf_iterator<char>());
  try {
    return ParseThresholdMapJson(text);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void WriteThresholdMapFile(const std::filesystem::path& path,
                           const ThresholdMap& map) {
  std::ofstream output(path, std::ios::binary | std::ios::trunc);
  if (!output) {
    throw RuntimeError(fmt::format("cannot write '{}'", path.string()));
  }
  output << RenderThresholdMapJson(map);
  if (!output) {
    throw RuntimeError(fmt::format("error writing '{}'", path.string()));
  }
}

std::string MapFingerprint(const ThresholdMap& map) {
  return Fingerprint(RenderThresholdMapJson(map));
}

}  // namespace fairthresh
