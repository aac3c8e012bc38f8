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

// Held-out evaluation of threshold maps: per-attribute BER discrepancies,
// method comparison reports and the fairness-budget tradeoff sweep.

#ifndef FAIRTHRESH_EVALUATE_H_
#define FAIRTHRESH_EVALUATE_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairthresh/fairopt.h"
#include "fairthresh/ingest.h"
#include "fairthresh/metrics.h"
#include "fairthresh/threshold_map.h"

namespace fairthresh {

// Binarizes every record against its group's threshold, or the map's
// fallback when the group is absent.
std::vector<int> ApplyThresholds(std::span<const Record> records,
                                 const ThresholdMap& map,
                                 std::span<const std::string> attributes);

// Per-category BER of a single attribute. Categories with undefined BER map
// to std::nullopt.
std::map<std::string, std::optional<double>> BerByCategory(
    std::span<const Record> records, std::span<const int> predictions,
    const std::string& attribute);

// max - min of BerByCategory over defined categories.
double BerDiscrepancy(std::span<const Record> records,
                      std::span<const int> predictions,
                      const std::string& attribute);

struct NamedMap {
  std::string name;
  ThresholdMap map;
};

struct GroupRow {
  std::string key;
  ConfusionMatrix confusion;
  PerformanceMetrics metrics;
};

struct MethodBlock {
  std::string method;
  ConfusionMatrix confusion;
  PerformanceMetrics overall;
  std::map<std::string, double> ber_discrepancy;
  std::map<std::string, std::map<std::string, std::optional<double>>>
      ber_by_category;
  std::vector<GroupRow> groups;
  // Categories left out of a discrepancy because their BER is undefined.
  std::vector<std::string> notes;
};

struct EvaluationReport {
  // Sorted.
  std::vector<std::string> attributes;
  std::vector<MethodBlock> methods;
};

// Per-group rows use `group_attributes`, or each map's own attributes when
// that list is empty.
EvaluationReport ComparativeReport(
    std::span<const Record> records, std::span<const NamedMap> maps,
    std::vector<std::string> attributes,
    std::span<const std::string> group_attributes = {});

// method,f1,acc,fair_<attribute>...,fpr,ber  (undefined values are empty)
void WriteReportCsv(std::ostream& output, const EvaluationReport& report);
// method,group,n,tp,fp,tn,fn,acc,f1,fpr,fnr,ber
void WriteGroupReportCsv(std::ostream& output, const EvaluationReport& report);

struct FrontierPoint {
  double disparity_budget = 0.0;
  std::optional<double> acc;
  std::optional<double> f1;
  // Largest selected fairness disparity of the map on the training groups,
  // i.e. the quantity the optimizer gates on.
  double achieved_disparity = 0.0;
  // The same disparity recomputed on the test records.
  double test_disparity = 0.0;
  std::int64_t iterations = 0;
  Termination termination = Termination::kContinue;
  std::string map_fingerprint;
  ThresholdMap map;
  // Non-empty when this point failed; the numeric fields are then unset.
  std::string error;
};

std::vector<double> DefaultDisparitySchedule();

// Largest selected fairness disparity across the `attributes` groups of
// `records` under `map`.
double MaxFairnessDisparity(std::span<const Record> records,
                            const ThresholdMap& map,
                            std::span<const std::string> attributes,
                            std::span<const FairnessMetric> metrics);

// One Optimize run per budget with fairness_gap = budget, evaluated on
// `test`. Points follow schedule order; a failing point records its error and
// the sweep continues.
std::vector<FrontierPoint> TradeoffSweep(const GroupedDataset& train,
                                         std::span<const Record> test,
                                         const OptimizerConfig& base,
                                         std::span<const double> schedule);

// disparity_budget,acc,f1,achieved_disparity,test_disparity,iterations,
// termination,map_fingerprint,error
void WriteFrontierCsv(std::ostream& output,
                      std::span<const FrontierPoint> points);

}  // namespace fairthresh

#endif  // FAIRTHRESH_EVALUATE_H_
