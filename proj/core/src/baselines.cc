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

#include "fairthresh/baselines.h"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "fairthresh/error.h"
#include "fairthresh/fingerprint.h"
#include "fairthresh/metrics.h"

namespace fairthresh {

ThresholdMap StaticThreshold(double value, std::span<const GroupKey> groups,
                             std::vector<std::string> attributes) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError(
        fmt::format("static threshold {} outside [0,1]", value));
  }
  ThresholdMap map;
  map.method = Method::kStatic;
  map.attributes = std::move(attributes);
  std::sort(map.attributes.begin(), map.attributes.end());
  map.fallback = value;
  for (const auto& key : groups) map.thresholds[key.ToString()] = value;
  map.config_fingerprint = Fingerprint(fmt::format("static:value={:.17g}", value));
  return map;
}

RocCurve BuildRocCurve(std::span<const double> scores,
                       std::span<const int> labels) {
  const SortedScores sorted(scores, labels);
  const ConfusionMatrix everything = sorted.ConfusionAt(0.0);
  if (everything.actual_positive() == 0 || everything.actual_negative() == 0) {
    throw ValidationError(
        "ROC curve needs both human (0) and AI (1) labels");
  }
  std::vector<double> candidates = sorted.scores();
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  candidates.push_back(candidates.back() + kRocSentinelOffset);
  std::reverse(candidates.begin(), candidates.end());

  RocCurve curve;
  curve.points.reserve(candidates.size());
  for (const double threshold : candidates) {
    const PerformanceMetrics m = DeriveMetrics(sorted.ConfusionAt(threshold));
    curve.points.push_back({threshold, *m.fpr, *m.recall});
  }
  return curve;
}

double OptimizeRocFpr(std::span<const double> scores,
                      std::span<const int> labels, double fpr_cap) {
  if (!(fpr_cap >= 0.0 && fpr_cap <= 1.0)) {
    throw ValidationError(fmt::format("FPR cap {} outside [0,1]", fpr_cap));
  }
  const RocCurve curve = BuildRocCurve(scores, labels);
  // Thresholds descend along the curve, so the last point reaching the best
  // TPR is the smallest such threshold.
  const RocPoint* best = nullptr;
  for (const RocPoint& point : curve.points) {
    if (point.fpr > fpr_cap) continue;
    if (best == nullptr || point.tpr >= best->tpr) best = &point;
  }
  // The sentinel always has fpr = 0.
  return best->threshold;
}

ThresholdMap RocFprThresholdMap(const GroupedDataset& grouped,
                                double fpr_cap) {
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(grouped.records().size());
  labels.reserve(grouped.records().size());
  for (const Record& record : grouped.records()) {
    scores.push_back(record.score);
    labels.push_back(record.label);
  }
  const double threshold = OptimizeRocFpr(scores, labels, fpr_cap);
  ThresholdMap map;
  map.method = Method::kRocFpr;
  map.attributes = grouped.attribute_names();
  map.fallback = threshold;
  for (const auto& [key, indices] : grouped.groups()) {
    map.thresholds[key.ToString()] = threshold;
  }
  map.config_fingerprint =
      Fingerprint(fmt::format("rocfpr:fpr_cap={:.17g}", fpr_cap));
  return map;
}

}  // namespace fairthresh
