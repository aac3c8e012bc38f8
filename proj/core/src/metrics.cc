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

#include "fairthresh/metrics.h"

#include <algorithm>
#include <numeric>

#include <fmt/core.h>

#include "fairthresh/error.h"
#include "json.hpp"

namespace fairthresh {
namespace {

std::optional<double> Ratio(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) return std::nullopt;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

void CheckLengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ValidationError(fmt::format(
        "length mismatch: {} scores/predictions vs {} labels", a, b));
  }
}

void CheckLabel(int label) {
  if (label != 0 && label != 1) {
    throw ValidationError(fmt::format("label {} is not binary", label));
  }
}

nlohmann::json OrNull(const std::optional<double>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

nlohmann::json MetricsObject(const PerformanceMetrics& m) {
  return {{"accuracy", OrNull(m.accuracy)},
          {"precision", OrNull(m.precision)},
          {"recall", OrNull(m.recall)},
          {"f1", OrNull(m.f1)},
          {"fpr", OrNull(m.fpr)},
          {"specificity", OrNull(m.specificity)},
          {"fnr", OrNull(m.fnr)},
          {"ber", OrNull(m.ber)}};
}

// Extremum of the defined entries; nullopt if none is defined.
std::optional<std::pair<double, double>> MinMax(
    const OptionalGroupRates& values) {
  std::optional<std::pair<double, double>> out;
  for (const auto& [key, value] : values) {
    if (!value) continue;
    if (!out) {
      out.emplace(*value, *value);
    } else {
      out->first = std::min(out->first, *value);
      out->second = std::max(out->second, *value);
    }
  }
  return out;
}

}  // namespace

void ConfusionMatrix::Add(int prediction, int label) {
  CheckLabel(label);
  if (prediction == 1) {
    ++(label == 1 ? tp : fp);
  } else {
    ++(label == 1 ? fn : tn);
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  tp += other.tp;
  fp += other.fp;
  tn += other.tn;
  fn += other.fn;
  return *this;
}

std::vector<int> Binarize(std::span<const double> scores, double threshold) {
  std::vector<int> out(scores.size());
  std::transform(scores.begin(), scores.end(), out.begin(),
                 [threshold](double s) { return s >= threshold ? 1 : 0; });
  return out;
}

ConfusionMatrix Confusion(std::span<const double> scores,
                          std::span<const int> labels, double threshold) {
  CheckLengths(scores.size(), labels.size());
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    cm.Add(scores[i] >= threshold ? 1 : 0, labels[i]);
  }
  return cm;
}

ConfusionMatrix ConfusionFromPredictions(std::span<const int> predictions,
                                         std::span<const int> labels) {
  CheckLengths(predictions.size(), labels.size());
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    cm.Add(predictions[i], labels[i]);
  }
  return cm;
}

PerformanceMetrics DeriveMetrics(const ConfusionMatrix& cm) {
  PerformanceMetrics m;
  m.accuracy = Ratio(cm.tp + cm.tn, cm.total());
  m.precision = Ratio(cm.tp, cm.tp + cm.fp);
  m.recall = Ratio(cm.tp, cm.tp + cm.fn);
  m.fnr = Ratio(cm.fn, cm.tp + cm.fn);
  m.fpr = Ratio(cm.fp, cm.fp + cm.tn);
  m.specificity = Ratio(cm.tn, cm.fp + cm.tn);
  if (m.precision && m.recall) {
    // 2PR/(P+R) reduces to 2TP/(2TP+FP+FN) whenever both are defined.
    m.f1 = Ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
  }
  if (m.fpr && m.fnr) m.ber = (*m.fpr + *m.fnr) / 2.0;
  return m;
}

std::optional<double> PositiveRate(const ConfusionMatrix& cm) {
  return Ratio(cm.predicted_positive(), cm.total());
}

SortedScores::SortedScores(std::span<const double> scores,
                           std::span<const int> labels) {
  CheckLengths(scores.size(), labels.size());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  scores_.reserve(scores.size());
  positives_below_.reserve(scores.size() + 1);
  positives_below_.push_back(0);
  for (const std::size_t i : order) {
    CheckLabel(labels[i]);
    scores_.push_back(scores[i]);
    positives_below_.push_back(positives_below_.back() + labels[i]);
  }
}

ConfusionMatrix SortedScores::ConfusionAt(double threshold) const {
  const auto first_positive =
      std::lower_bound(scores_.begin(), scores_.end(), threshold);
  const auto below =
      static_cast<std::size_t>(first_positive - scores_.begin());
  const std::int64_t n = static_cast<std::int64_t>(scores_.size());
  const std::int64_t positives = positives_below_.back();
  ConfusionMatrix cm;
  cm.fn = positives_below_[below];
  cm.tn = static_cast<std::int64_t>(below) - cm.fn;
  cm.tp = positives - cm.fn;
  cm.fp = (n - static_cast<std::int64_t>(below)) - cm.tp;
  return cm;
}

double DemographicParityGap(const GroupRates& positive_rate_by_group) {
  if (positive_rate_by_group.empty()) {
    throw ValidationError("demographic parity gap of an empty group set");
  }
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& [key, rate] : positive_rate_by_group) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw ValidationError(fmt::format(
          "positive rate {} of group '{}' outside [0,1]", rate, key.ToString()));
    }
    lo = std::min(lo, rate);
    hi = std::max(hi, rate);
  }
  return hi - lo;
}

double EqualizedOddsGap(const OptionalGroupRates& tpr_by_group,
                        const OptionalGroupRates& fpr_by_group) {
  if (tpr_by_group.empty() || fpr_by_group.empty()) {
    throw ValidationError("equalized odds gap of an empty group set");
  }
  const auto tpr = MinMax(tpr_by_group);
  const auto fpr = MinMax(fpr_by_group);
  return (tpr ? tpr->second - tpr->first : 0.0) +
         (fpr ? fpr->second - fpr->first : 0.0);
}

double Disparity(const OptionalGroupRates& values_by_group) {
  const auto range = MinMax(values_by_group);
  if (!range) {
    throw ValidationError("disparity: no group has a defined value");
  }
  return range->second - range->first;
}

double RelaxedFairnessRatio(const OptionalGroupRates& values_by_group) {
  for (const auto& [key, value] : values_by_group) {
    if (value && *value < 0.0) {
      throw ValidationError(fmt::format(
          "relaxed fairness ratio: negative value {} for group '{}'", *value,
          key.ToString()));
    }
  }
  const auto range = MinMax(values_by_group);
  if (!range) {
    throw ValidationError("relaxed fairness ratio: no defined value");
  }
  if (range->second == 0.0) return 1.0;
  return range->first / range->second;
}

FairnessReport BuildFairnessReport(
    const std::map<GroupKey, ConfusionMatrix>& by_group, double tau) {
  if (by_group.empty()) {
    throw ValidationError("fairness report of an empty group set");
  }
  FairnessReport report;
  report.tau = tau;
  OptionalGroupRates positive;
  for (const auto& [key, cm] : by_group) {
    const PerformanceMetrics m = DeriveMetrics(cm);
    const auto rate = PositiveRate(cm);
    if (rate) report.positive_rate[key] = *rate;
    positive[key] = rate;
    report.tpr[key] = m.recall;
    report.fpr[key] = m.fpr;
    if (!m.recall) report.excluded.push_back("tpr:" + key.ToString());
    if (!m.fpr) report.excluded.push_back("fpr:" + key.ToString());
  }
  report.dp_gap = DemographicParityGap(report.positive_rate);
  report.eo_gap = EqualizedOddsGap(report.tpr, report.fpr);
  report.relaxed_ratio = RelaxedFairnessRatio(positive);
  report.passes_relaxed = PassesRelaxedFairness(report.relaxed_ratio, tau);
  return report;
}

std::string ToJson(const PerformanceMetrics& metrics) {
  return MetricsObject(metrics).dump();
}

std::string ToJson(const FairnessReport& report) {
  nlohmann::json out;
  out["dp_gap"] = report.dp_gap;
  out["eo_gap"] = report.eo_gap;
  out["relaxed_ratio"] = report.relaxed_ratio;
  out["tau"] = report.tau;
  out["passes_relaxed"] = report.passes_relaxed;
  for (const auto& [key, rate] : report.positive_rate) {
    out["positive_rate:" + key.ToString()] = rate;
  }
  for (const auto& [key, rate] : report.tpr) {
    out["tpr:" + key.ToString()] = OrNull(rate);
  }
  for (const auto& [key, rate] : report.fpr) {
    out["fpr:" + key.ToString()] = OrNull(rate);
  }
  out["excluded"] = report.excluded;
  return out.dump();
}

}  // namespace fairthresh
