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

#include <algorithm>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fairthresh/baselines.h"
#include "fairthresh/error.h"
#include "fairthresh/evaluate.h"
#include "fairthresh/fairopt.h"
#include "fairthresh/metrics.h"
#include "fairthresh/synthetic.h"
#include "testing/fixtures.h"
#include "testing/oracles.h"

namespace fairthresh {
namespace {

const std::vector<std::string> kBoth = {"length", "personality"};

Record MakeRecord(double score, int label, const std::string& length,
                  const std::string& personality) {
  return {std::nullopt, score, label,
          {{"length", length}, {"personality", personality}}};
}

ThresholdMap SampleMap() {
  ThresholdMap map;
  map.method = Method::kFairOpt;
  map.attributes = kBoth;
  map.fallback = 0.5;
  map.thresholds = {{"long_extroversion", 0.25}, {"short_openness", 0.7}};
  return map;
}

TEST(ApplyThresholdsTest, UsesTheGroupThreshold) {
  const std::vector<Record> records = {
      MakeRecord(0.26, 0, "long", "extroversion"),
      MakeRecord(0.6, 1, "short", "openness")};
  EXPECT_EQ(ApplyThresholds(records, SampleMap(), {}),
            (std::vector<int>{1, 0}));
}

TEST(ApplyThresholdsTest, UnseenGroupUsesFallback) {
  const std::vector<Record> records = {
      MakeRecord(0.4, 1, "medium", "neuroticism"),
      MakeRecord(0.5, 1, "medium", "neuroticism")};
  EXPECT_EQ(ApplyThresholds(records, SampleMap(), {}),
            (std::vector<int>{0, 1}));
  Record missing;
  missing.score = 0.45;
  EXPECT_EQ(ApplyThresholds(std::span(&missing, 1), SampleMap(), {}),
            (std::vector<int>{0}));
}

TEST(ApplyThresholdsTest, UniformMapReducesToStaticRule) {
  const auto records = GenerateSynthetic(testing::ShiftedBattery(20), 3);
  std::vector<GroupKey> keys;
  for (const auto& l : testing::kLengths) {
    for (const auto& p : testing::kPersonalities) {
      keys.push_back(testing::LengthPersonalityKey(l, p));
    }
  }
  std::vector<double> scores;
  for (const auto& r : records) scores.push_back(r.score);
  EXPECT_EQ(ApplyThresholds(records, StaticThreshold(0.5, keys, kBoth), {}),
            Binarize(scores, 0.5));
}

// short: FPR 0.2, FNR 0.2; medium: FPR 0.3, FNR 0.4; long: FPR 0.25,
// FNR 0.25.
std::vector<Record> KnownBerRecords(std::vector<int>* predictions) {
  std::vector<Record> records;
  const auto add = [&](const std::string& length, int label, int prediction,
                       int n) {
    for (int i = 0; i < n; ++i) {
      records.push_back(MakeRecord(0.5, label, length, "openness"));
      predictions->push_back(prediction);
    }
  };
  add("short", 0, 1, 2);
  add("short", 0, 0, 8);
  add("short", 1, 0, 2);
  add("short", 1, 1, 8);
  add("medium", 0, 1, 3);
  add("medium", 0, 0, 7);
  add("medium", 1, 0, 4);
  add("medium", 1, 1, 6);
  add("long", 0, 1, 1);
  add("long", 0, 0, 3);
  add("long", 1, 0, 1);
  add("long", 1, 1, 3);
  return records;
}

TEST(BerDiscrepancyTest, KnownCategories) {
  std::vector<int> predictions;
  const auto records = KnownBerRecords(&predictions);
  const auto by_category = BerByCategory(records, predictions, "length");
  EXPECT_NEAR(*by_category.at("short"), 0.20, 1e-12);
  EXPECT_NEAR(*by_category.at("medium"), 0.35, 1e-12);
  EXPECT_NEAR(*by_category.at("long"), 0.25, 1e-12);
  EXPECT_NEAR(BerDiscrepancy(records, predictions, "length"), 0.15, 1e-12);
  EXPECT_EQ(BerDiscrepancy(records, predictions, "personality"), 0.0);
}

TEST(BerDiscrepancyTest, UndefinedCategoryIsSkipped) {
  std::vector<int> predictions;
  auto records = KnownBerRecords(&predictions);
  records.push_back(MakeRecord(0.9, 1, "huge", "openness"));
  predictions.push_back(1);
  EXPECT_FALSE(BerByCategory(records, predictions, "length").at("huge"));
  EXPECT_NEAR(BerDiscrepancy(records, predictions, "length"), 0.15, 1e-12);
}

TEST(BerDiscrepancyTest, MatchesPerCategoryLoop) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto records =
        GenerateSynthetic(testing::ShiftedBattery(15), 40 + trial);
    std::vector<int> predictions;
    for (std::size_t i = 0; i < records.size(); ++i) {
      predictions.push_back(static_cast<int>(rng() % 2));
    }
    for (const std::string attribute : {"length", "personality"}) {
      EXPECT_NEAR(BerDiscrepancy(records, predictions, attribute),
                  testing::BruteBerDiscrepancy(records, predictions, attribute),
                  1e-12);
    }
  }
}

TEST(ComparativeReportTest, SingleStaticBlockEqualsWholeDataset) {
  const auto records = GenerateSynthetic(testing::ShiftedBattery(25), 8);
  const std::vector<NamedMap> maps = {
      {"static", StaticThreshold(0.5, {}, kBoth)}};
  const auto report = ComparativeReport(records, maps, kBoth);
  ASSERT_EQ(report.methods.size(), 1u);
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& r : records) {
    scores.push_back(r.score);
    labels.push_back(r.label);
  }
  const auto cm = Confusion(scores, labels, 0.5);
  EXPECT_EQ(report.methods[0].confusion, cm);
  EXPECT_EQ(report.methods[0].overall.accuracy, DeriveMetrics(cm).accuracy);
  EXPECT_EQ(report.methods[0].overall.ber, DeriveMetrics(cm).ber);
  EXPECT_EQ(report.methods[0].groups.size(), 15u);
}

TEST(ComparativeReportTest, IdenticalMapsGiveIdenticalBlocks) {
  const auto records = GenerateSynthetic(testing::ShiftedBattery(25), 9);
  const std::vector<NamedMap> maps = {{"a", SampleMap()}, {"b", SampleMap()}};
  const auto report = ComparativeReport(records, maps, kBoth);
  ASSERT_EQ(report.methods.size(), 2u);
  EXPECT_EQ(report.methods[0].confusion, report.methods[1].confusion);
  EXPECT_EQ(report.methods[0].ber_discrepancy,
            report.methods[1].ber_discrepancy);
  std::ostringstream out;
  WriteReportCsv(out, report);
  EXPECT_EQ(out.str().rfind(
                "method,f1,acc,fair_length,fair_personality,fpr,ber\n", 0),
            0u);
}

TEST(ComparativeReportTest, FairOptNarrowsLengthBerGap) {
  std::vector<SyntheticGroupSpec> spec(2);
  spec[0].key = GroupKey(std::vector<GroupKey::Part>{{"length", "short"}});
  spec[0].n_human = 300;
  spec[0].n_ai = 300;
  spec[0].human = {2.0, 5.0};
  spec[0].ai = {5.0, 2.0};
  spec[1].key = GroupKey(std::vector<GroupKey::Part>{{"length", "long"}});
  spec[1].n_human = 300;
  spec[1].n_ai = 300;
  spec[1].human = {2.0, 14.0};
  spec[1].ai = {3.0, 6.0};
  const auto records = GenerateSynthetic(spec, 5);
  const auto grouped = GroupedDataset::Partition(records, {"length"});
  OptimizerConfig config;
  config.learning_rate = 0.02;
  config.fd_step = 0.01;
  config.tol = 1e-6;
  config.fairness_gap = 1.0;
  const auto fairopt = Optimize(grouped, config).map;
  std::vector<GroupKey> keys;
  for (const auto& [key, rows] : grouped.groups()) keys.push_back(key);
  const std::vector<NamedMap> maps = {
      {"static", StaticThreshold(0.5, keys, {"length"})}, {"fairopt", fairopt}};
  const std::vector<std::string> length = {"length"};
  const auto report = ComparativeReport(records, maps, length);
  const double static_gap = report.methods[0].ber_discrepancy.at("length");
  const double fair_gap = report.methods[1].ber_discrepancy.at("length");
  EXPECT_LE(fair_gap, static_gap);
  EXPECT_NEAR(fair_gap,
              testing::BruteBerDiscrepancy(
                  records, ApplyThresholds(records, fairopt, {}), "length"),
              1e-12);
}

TEST(TradeoffSweepTest, OnePointPerBudget) {
  const auto records = GenerateSynthetic(testing::ShiftedBattery(20), 10);
  const auto grouped = GroupedDataset::Partition(records, kBoth);
  OptimizerConfig config;
  config.max_iterations = 200;
  const std::vector<double> one = {1.0};
  const auto single = TradeoffSweep(grouped, records, config, one);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_TRUE(single[0].error.empty());
  EXPECT_LE(single[0].achieved_disparity, 1.0);
  const auto schedule = DefaultDisparitySchedule();
  EXPECT_EQ(schedule, (std::vector<double>{1.00, 0.30, 0.25, 0.21, 0.20, 0.19,
                                           0.15, 0.10}));
  const auto points = TradeoffSweep(grouped, records, config, schedule);
  ASSERT_EQ(points.size(), 8u);
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_EQ(points[i].disparity_budget, schedule[i]);
    if (points[i].termination == Termination::kConverged) {
      EXPECT_LE(points[i].achieved_disparity, schedule[i]);
    }
  }
  std::ostringstream out;
  WriteFrontierCsv(out, points);
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 9);
}

TEST(TradeoffSweepTest, RejectsEmptySchedule) {
  const auto records = GenerateSynthetic(testing::ShiftedBattery(5), 1);
  const auto grouped = GroupedDataset::Partition(records, kBoth);
  EXPECT_THROW(TradeoffSweep(grouped, records, OptimizerConfig{}, {}),
               ValidationError);
}

}  // namespace
}  // namespace fairthresh
