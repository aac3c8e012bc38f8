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

// Confusion matrices, performance metrics and group fairness gaps.
//
// Decision rule: a score is predicted positive iff score >= threshold.
// Metrics whose denominator is zero are std::nullopt ("undefined"), never 0.

#ifndef FAIRTHRESH_METRICS_H_
#define FAIRTHRESH_METRICS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairthresh/ingest.h"

namespace fairthresh {

struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const { return tp + fp + tn + fn; }
  std::int64_t predicted_positive() const { return tp + fp; }
  std::int64_t actual_positive() const { return tp + fn; }
  std::int64_t actual_negative() const { return fp + tn; }

  void Add(int prediction, int label);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&,
                         const ConfusionMatrix&) = default;
};

struct PerformanceMetrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;  // TPR
  std::optional<double> f1;
  std::optional<double> fpr;
  std::optional<double> specificity;  // TNR
  std::optional<double> fnr;
  std::optional<double> ber;
};

std::vector<int> Binarize(std::span<const double> scores, double threshold);

ConfusionMatrix Confusion(std::span<const double> scores,
                          std::span<const int> labels, double threshold);
ConfusionMatrix ConfusionFromPredictions(std::span<const int> predictions,
                                         std::span<const int> labels);

PerformanceMetrics DeriveMetrics(const ConfusionMatrix& cm);

// (tp + fp) / total; undefined for an empty matrix.
std::optional<double> PositiveRate(const ConfusionMatrix& cm);

// Scores of one group sorted once so the confusion matrix at any threshold
// is a binary search away. Agrees exactly with Confusion().
class SortedScores {
 public:
  SortedScores(std::span<const double> scores, std::span<const int> labels);

  ConfusionMatrix ConfusionAt(double threshold) const;
  std::size_t size() const { return scores_.size(); }
  // Ascending.
  const std::vector<double>& scores() const { return scores_; }

 private:
  std::vector<double> scores_;
  // positives_below_[i] = number of label-1 records among scores_[0, i).
  std::vector<std::int64_t> positives_below_;
};

using GroupRates = std::map<GroupKey, double>;
using OptionalGroupRates = std::map<GroupKey, std::optional<double>>;

// max - min of the positive-prediction rates. Throws on an empty map.
double DemographicParityGap(const GroupRates& positive_rate_by_group);

// (max TPR - min TPR) + (max FPR - min FPR). Undefined entries are left out
// of their extremum; a component with no defined entry contributes 0.
double EqualizedOddsGap(const OptionalGroupRates& tpr_by_group,
                        const OptionalGroupRates& fpr_by_group);

// max - min over the defined entries. Throws if none is defined.
double Disparity(const OptionalGroupRates& values_by_group);

// min / max over the defined entries, 1 when max is 0.
double RelaxedFairnessRatio(const OptionalGroupRates& values_by_group);
inline bool PassesRelaxedFairness(double ratio, double tau) {
  return ratio >= tau;
}

struct FairnessReport {
  double dp_gap = 0.0;
  double eo_gap = 0.0;
  GroupRates positive_rate;
  OptionalGroupRates tpr;
  OptionalGroupRates fpr;
  // Computed over the positive rates.
  double relaxed_ratio = 1.0;
  double tau = 0.8;
  bool passes_relaxed = true;
  // "tpr:<group>" / "fpr:<group>" for every entry left out of an extremum.
  std::vector<std::string> excluded;
};

FairnessReport BuildFairnessReport(
    const std::map<GroupKey, ConfusionMatrix>& by_group, double tau = 0.8);

// Flat JSON objects; undefined metrics are null.
std::string ToJson(const PerformanceMetrics& metrics);
std::string ToJson(const FairnessReport& report);

}  // namespace fairthresh

#endif  // FAIRTHRESH_METRICS_H_
