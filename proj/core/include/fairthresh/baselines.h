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

// Comparison thresholding methods: one universal static threshold, and the
// global ROC threshold maximizing TPR under a false-positive-rate cap.

#ifndef FAIRTHRESH_BASELINES_H_
#define FAIRTHRESH_BASELINES_H_

#include <span>
#include <string>
#include <vector>

#include "fairthresh/ingest.h"
#include "fairthresh/threshold_map.h"

namespace fairthresh {

inline constexpr double kDefaultStaticThreshold = 0.5;
inline constexpr double kDefaultFprCap = 0.1;

// Offset of the ROC sentinel above the largest observed score. One unit in
// the 7th decimal keeps the sentinel distinct after serialization.
inline constexpr double kRocSentinelOffset = 1e-7;

ThresholdMap StaticThreshold(double value, std::span<const GroupKey> groups,
                             std::vector<std::string> attributes = {});

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  // Thresholds strictly descending: the sentinel first, then every distinct
  // score.
  std::vector<RocPoint> points;
};

// Throws ValidationError unless both classes are present.
RocCurve BuildRocCurve(std::span<const double> scores,
                       std::span<const int> labels);

// Maximum-TPR candidate with fpr <= fpr_cap; among equal TPRs the smallest
// threshold wins.
double OptimizeRocFpr(std::span<const double> scores,
                      std::span<const int> labels, double fpr_cap);

// OptimizeRocFpr over every record of `grouped`, applied to all its groups
// and used as the fallback.
ThresholdMap RocFprThresholdMap(const GroupedDataset& grouped, double fpr_cap);

}  // namespace fairthresh

#endif  // FAIRTHRESH_BASELINES_H_
