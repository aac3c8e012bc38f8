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

#include "fairthresh/evaluate.h"

#include <algorithm>
#include <exception>
#include <ostream>

#include <fmt/core.h>

#include "csv.h"
#include "fairthresh/error.h"

namespace fairthresh {
namespace {

std::string Num(const std::optional<double>& value) {
  return value ? fmt::format("{:.17g}", *value) : std::string();
}

void CheckSameSize(std::span<const Record> records,
                   std::span<const int> predictions) {
  if (records.size() != predictions.size()) {
    throw ValidationError(fmt::format(
        "{} records but {} predictions", records.size(), predictions.size()));
  }
}

std::map<GroupKey, ConfusionMatrix> ConfusionByGroup(
    std::span<const Record> records, std::span<const int> predictions,
    std::span<const std::string> attributes) {
  CheckSameSize(records, predictions);
  std::map<GroupKey, ConfusionMatrix> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    out[GroupKey::FromRecord(records[i], attributes, i + 1)].Add(
        predictions[i], records[i].label);
  }
  return out;
}

}  // namespace

std::vector<int> ApplyThresholds(std::span<const Record> records,
                                 const ThresholdMap& map,
                                 std::span<const std::string> attributes) {
  if (attributes.empty()) attributes = map.attributes;
  std::vector<std::string> sorted(attributes.begin(), attributes.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> predictions;
  predictions.reserve(records.size());
  for (const Record& record : records) {
    double threshold = map.fallback;
    const bool complete = std::all_of(
        sorted.begin(), sorted.end(), [&](const std::string& name) {
          const auto it = record.attributes.find(name);
          return it != record.attributes.end() && !it->second.empty();
        });
    if (complete) {
      threshold = map.ThresholdFor(GroupKey::FromRecord(record, sorted).ToString());
    }
    predictions.push_back(record.score >= threshold ? 1 : 0);
  }
  return predictions;
}

std::map<std::string, std::optional<double>> BerByCategory(
    std::span<const Record> records, std::span<const int> predictions,
    const std::string& attribute) {
  const std::string names[] = {attribute};
  std::map<std::string, std::optional<double>> out;
  for (const auto& [key, cm] : ConfusionByGroup(records, predictions, names)) {
    out[key.parts().front().second] = DeriveMetrics(cm).ber;
  }
  return out;
}

double BerDiscrepancy(std::span<const Record> records,
                      std::span<const int> predictions,
                      const std::string& attribute) {
  std::optional<double> lo;
  std::optional<double> hi;
  for (const auto& [category, ber] :
       BerByCategory(records, predictions, attribute)) {
    if (!ber) continue;
    lo = lo ? std::min(*lo, *ber) : *ber;
    hi = hi ? std::max(*hi, *ber) : *ber;
  }
  if (!lo) {
    throw ValidationError(fmt::format(
        "BER discrepancy over '{}': no category has a defined BER",
        attribute));
  }
  return *hi - *lo;
}

EvaluationReport ComparativeReport(
    std::span<const Record> records, std::span<const NamedMap> maps,
    std::vector<std::string> attributes,
    std::span<const std::string> group_attributes) {
  if (maps.empty()) {
    throw ValidationError("comparative report needs at least one map");
  }
  std::sort(attributes.begin(), attributes.end());
  attributes.erase(std::unique(attributes.begin(), attributes.end()),
                   attributes.end());
  EvaluationReport report;
  report.attributes = attributes;
  for (const NamedMap& named : maps) {
    MethodBlock block;
    block.method = named.name;
    const std::vector<int> predictions =
        ApplyThresholds(records, named.map, group_attributes);
    for (std::size_t i = 0; i < records.size(); ++i) {
      block.confusion.Add(predictions[i], records[i].label);
    }
    block.overall = DeriveMetrics(block.confusion);
    for (const auto& attribute : attributes) {
      auto by_category = BerByCategory(records, predictions, attribute);
      for (const auto& [category, ber] : by_category) {
        if (!ber) {
          block.notes.push_back(fmt::format(
              "{}={}: BER undefined, excluded", attribute, category));
        }
      }
      block.ber_discrepancy[attribute] =
          BerDiscrepancy(records, predictions, attribute);
      block.ber_by_category[attribute] = std::move(by_category);
    }
    const std::span<const std::string> row_source =
        group_attributes.empty()
            ? std::span<const std::string>(named.map.attributes)
            : group_attributes;
    std::vector<std::string> row_attributes(row_source.begin(),
                                            row_source.end());
    std::sort(row_attributes.begin(), row_attributes.end());
    for (const auto& [key, cm] :
         ConfusionByGroup(records, predictions, row_attributes)) {
      block.groups.push_back({key.ToString(), cm, DeriveMetrics(cm)});
    }
    report.methods.push_back(std::move(block));
  }
  return report;
}

void WriteReportCsv(std::ostream& output, const EvaluationReport& report) {
  std::vector<std::string> header = {"method", "f1", "acc"};
  for (const auto& attribute : report.attributes) {
    header.push_back("fair_" + attribute);
  }
  header.push_back("fpr");
  header.push_back("ber");
  output << internal::JoinCsvLine(header) << '\n';
  for (const MethodBlock& block : report.methods) {
    std::vector<std::string> row = {block.method, Num(block.overall.f1),
                                    Num(block.overall.accuracy)};
    for (const auto& attribute : report.attributes) {
      row.push_back(Num(block.ber_discrepancy.at(attribute)));
    }
    row.push_back(Num(block.overall.fpr));
    row.push_back(Num(block.overall.ber));
    output << internal::JoinCsvLine(row) << '\n';
  }
}

void WriteGroupReportCsv(std::ostream& output, const EvaluationReport& report) {
  output << "method,group,n,tp,fp,tn,fn,acc,f1,fpr,fnr,ber\n";
  for (const MethodBlock& block : report.methods) {
    for (const GroupRow& row : block.groups) {
      const std::vector<std::string> fields = {
          block.method,
          row.key,
          std::to_string(row.confusion.total()),
          std::to_string(row.confusion.tp),
          std::to_string(row.confusion.fp),
          std::to_string(row.confusion.tn),
          std::to_string(row.confusion.fn),
          Num(row.metrics.accuracy),
          Num(row.metrics.f1),
          Num(row.metrics.fpr),
          Num(row.metrics.fnr),
          Num(row.metrics.ber)};
      output << internal::JoinCsvLine(fields) << '\n';
    }
  }
}

std::vector<double> DefaultDisparitySchedule() {
  return {1.00, 0.30, 0.25, 0.21, 0.20, 0.19, 0.15, 0.10};
}

double MaxFairnessDisparity(std::span<const Record> records,
                            const ThresholdMap& map,
                            std::span<const std::string> attributes,
                            std::span<const FairnessMetric> metrics) {
  std::vector<std::string> sorted(attributes.begin(), attributes.end());
  std::sort(sorted.begin(), sorted.end());
  const std::vector<int> predictions = ApplyThresholds(records, map, sorted);
  const auto by_group = ConfusionByGroup(records, predictions, sorted);
  double out = 0.0;
  for (const auto metric : metrics) {
    if (metric == FairnessMetric::kDemographicParity) {
      GroupRates rates;
      for (const auto& [key, cm] : by_group) rates[key] = *PositiveRate(cm);
      out = std::max(out, DemographicParityGap(rates));
    } else {
      OptionalGroupRates tpr;
      OptionalGroupRates fpr;
      for (const auto& [key, cm] : by_group) {
        const PerformanceMetrics m = DeriveMetrics(cm);
        tpr[key] = m.recall;
        fpr[key] = m.fpr;
      }
      out = std::max(out, EqualizedOddsGap(tpr, fpr));
    }
  }
  return out;
}

std::vector<FrontierPoint> TradeoffSweep(const GroupedDataset& train,
                                         std::span<const Record> test,
                                         const OptimizerConfig& base,
                                         std::span<const double> schedule) {
  if (schedule.empty()) {
    throw ValidationError("tradeoff sweep: empty disparity schedule");
  }
  std::vector<FrontierPoint> points;
  points.reserve(schedule.size());
  for (const double budget : schedule) {
    FrontierPoint point;
    point.disparity_budget = budget;
    try {
      OptimizerConfig config = base;
      config.fairness_gap = budget;
      OptimizeResult result = Optimize(train, config);
      const std::vector<int> predictions =
          ApplyThresholds(test, result.map, train.attribute_names());
      ConfusionMatrix cm;
      for (std::size_t i = 0; i < test.size(); ++i) {
        cm.Add(predictions[i], test[i].label);
      }
      const PerformanceMetrics m = DeriveMetrics(cm);
      point.acc = m.accuracy;
      point.f1 = m.f1;
      point.achieved_disparity =
          MaxFairnessDisparity(train.records(), result.map,
                               train.attribute_names(), config.fairness_metrics);
      point.test_disparity = MaxFairnessDisparity(
          test, result.map, train.attribute_names(), config.fairness_metrics);
      point.iterations = result.trace.iterations;
      point.termination = result.trace.reason;
      point.map_fingerprint = MapFingerprint(result.map);
      point.map = std::move(result.map);
    } catch (const std::exception& e) {
      point = FrontierPoint{};
      point.disparity_budget = budget;
      point.error = e.what();
    }
    points.push_back(std::move(point));
  }
  return points;
}

void WriteFrontierCsv(std::ostream& output,
                      std::span<const FrontierPoint> points) {
  output << "disparity_budget,acc,f1,achieved_disparity,test_disparity,"
            "iterations,termination,map_fingerprint,error\n";
  for (const FrontierPoint& p : points) {
    std::vector<std::string> row = {fmt::format("{:.17g}", p.disparity_budget)};
    if (p.error.empty()) {
      row.insert(row.end(),
                 {Num(p.acc), Num(p.f1), Num(p.achieved_disparity),
                  Num(p.test_disparity), std::to_string(p.iterations),
                  std::string(TerminationName(p.termination)),
                  p.map_fingerprint, ""});
    } else {
      row.insert(row.end(), {"", "", "", "", "", "", "", p.error});
    }
    output << internal::JoinCsvLine(row) << '\n';
  }
}

}  // namespace fairthresh
