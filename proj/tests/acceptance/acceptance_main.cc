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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "fairthresh/baselines.h"
#include "fairthresh/cli/commands.h"
#include "fairthresh/evaluate.h"
#include "fairthresh/fairopt.h"
#include "fairthresh/ingest.h"
#include "fairthresh/metrics.h"
#include "fairthresh/stats.h"
#include "fairthresh/synthetic.h"
#include "fairthresh/threshold_map.h"
#include "testing/fixtures.h"
#include "testing/oracles.h"

namespace fairthresh::acceptance {
namespace {

namespace fs = std::filesystem;
using testing::kLengths;
using testing::kPersonalities;

constexpr double kInf = std::numeric_limits<double>::infinity();
const std::vector<std::string> kBoth = {"length", "personality"};

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Two overlapping groups, 100 human and 100 AI records each.
std::vector<SyntheticGroupSpec> OverlapPair() {
  std::vector<SyntheticGroupSpec> spec(2);
  spec[0].key = GroupKey(std::vector<GroupKey::Part>{{"length", "short"}});
  spec[0].n_human = 100;
  spec[0].n_ai = 100;
  spec[0].human = {2.0, 5.0};
  spec[0].ai = {5.0, 2.0};
  spec[1].key = GroupKey(std::vector<GroupKey::Part>{{"length", "long"}});
  spec[1].n_human = 100;
  spec[1].n_ai = 100;
  spec[1].human = {2.0, 8.0};
  spec[1].ai = {4.0, 3.0};
  return spec;
}

Outcome GridOracleEquivalence() {
  OptimizerConfig config;
  config.penalty_weight = 0.0;
  config.fairness_gap = kInf;
  config.clip_lower = 0.0;
  config.clip_upper = 1.0;
  config.tol = 1e-12;
  int matched = 0;
  double worst_shortfall = 0.0;
  double slowest = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto grouped = GroupedDataset::Partition(
        GenerateSynthetic(OverlapPair(), seed), {"length"});
    const auto start = std::chrono::steady_clock::now();
    const OptimizeResult result = Optimize(grouped, config);
    slowest = std::max(slowest, std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - start)
                                    .count());
    bool all = true;
    for (const auto& [key, rows] : grouped.groups()) {
      const LabeledScores data = grouped.Gather(key);
      const double theta = result.map.thresholds.at(key.ToString());
      const double shortfall =
          testing::GridBestAccuracy(data.scores, data.labels) -
          testing::BruteAccuracy(data.scores, data.labels, theta);
      worst_shortfall = std::max(worst_shortfall, shortfall);
      if (shortfall > 1e-9) all = false;
    }
    if (all) ++matched;
  }
  return {matched >= 19 && slowest < 10.0,
          fmt::format("{}/20 seeds reach the grid optimum in every group "
                      "(need 19); worst accuracy shortfall {:.4f}; slowest "
                      "run {:.3f} s",
                      matched, worst_shortfall, slowest)};
}

// 10,000 records over 15 length x personality groups. AI scores sink as the
// group index grows, so one fixed threshold misses more AI text in some
// groups than in others.
std::vector<Record> TenThousand(std::uint64_t seed) {
  std::vector<SyntheticGroupSpec> spec;
  for (std::size_t l = 0; l < kLengths.size(); ++l) {
    for (std::size_t p = 0; p < kPersonalities.size(); ++p) {
      const double shift = 2.0 * (static_cast<double>(l) + 0.5 * static_cast<double>(p));
      SyntheticGroupSpec g;
      g.key = testing::LengthPersonalityKey(kLengths[l], kPersonalities[p]);
      g.n_human = spec.size() < 10 ? 334 : 333;
      g.n_ai = 333;
      g.human = {2.0, 6.0 + shift};
      g.ai = {6.0, 2.0 + shift};
      spec.push_back(g);
    }
  }
  return GenerateSynthetic(spec, seed);
}

Outcome FairnessGapReduction() {
  const std::vector<Record> train = TenThousand(101);
  const std::vector<Record> test = TenThousand(202);
  const auto grouped = GroupedDataset::Partition(train, kBoth);
  const OptimizerConfig config;
  const OptimizeResult result = Optimize(grouped, config);
  std::vector<GroupKey> keys;
  for (const auto& [key, rows] : grouped.groups()) keys.push_back(key);
  const ThresholdMap fixed = StaticThreshold(0.5, keys, kBoth);
  const std::vector<int> fair_pred = ApplyThresholds(test, result.map, {});
  const std::vector<int> static_pred = ApplyThresholds(test, fixed, {});
  bool pass = train.size() == 10000 && grouped.num_groups() == 15;
  std::string detail;
  for (const auto& attribute : kBoth) {
    const double fair = BerDiscrepancy(test, fair_pred, attribute);
    const double base = BerDiscrepancy(test, static_pred, attribute);
    if (!(fair <= base)) pass = false;
    detail += fmt::format("{} BER gap fairopt {:.4f} vs static {:.4f}; ",
                          attribute, fair, base);
  }
  GroupRates rates;
  for (const auto& [key, rows] : grouped.groups()) {
    const LabeledScores data = grouped.Gather(key);
    rates[key] = *PositiveRate(Confusion(
        data.scores, data.labels, result.map.thresholds.at(key.ToString())));
  }
  const double dp = DemographicParityGap(rates);
  if (result.trace.reason == Termination::kConverged && dp > 0.2) pass = false;
  detail += fmt::format("termination {} after {} sweeps, train DP gap {:.4f}",
                        TerminationName(result.trace.reason),
                        result.trace.iterations, dp);
  return {pass, detail};
}

Outcome RocFprSoundness() {
  std::mt19937_64 rng(303);
  int good = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    testing::RandomScores(rng, 50 + rng() % 950, scores, labels,
                          trial % 2 == 1);
    const double cap = (trial % 5) * 0.05;
    const double theta = OptimizeRocFpr(scores, labels, cap);
    const testing::Tally t = testing::BruteTally(scores, labels, theta);
    const double fpr = static_cast<double>(t.fp) / (t.fp + t.tn);
    const double tpr = static_cast<double>(t.tp) / (t.tp + t.fn);
    if (fpr <= cap && tpr == testing::ExhaustiveRocFpr(scores, labels, cap).tpr) {
      ++good;
    }
  }
  return {good == 50, fmt::format("{}/50 datasets sound and TPR-maximal", good)};
}

Outcome KsCorrectness() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_d = 0.0, worst_p = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(5 + rng() % 200), b(5 + rng() % 200);
    for (double& x : a) x = trial % 2 ? std::round(unit(rng) * 20) / 20 : unit(rng);
    for (double& x : b) x = trial % 2 ? std::round(unit(rng) * 20) / 20 : unit(rng) * 0.9;
    const KsResult r = KsTwoSample(a, b);
    worst_d = std::max(worst_d,
                       std::abs(r.statistic - testing::BruteKsStatistic(a, b)));
    worst_p = std::max(worst_p,
                       std::abs(r.p_value - testing::KsPValueReference(
                                                r.statistic, a.size(), b.size())));
  }
  const std::vector<double> same = {0.1, 0.5, 0.5, 0.9};
  const double identical = KsTwoSample(same, same).statistic;
  const double disjoint = KsTwoSample(std::vector<double>{0.1, 0.2, 0.3},
                                      std::vector<double>{0.6, 0.9})
                              .statistic;
  return {worst_d <= 1e-12 && worst_p <= 1e-6 && identical == 0.0 &&
              disjoint == 1.0,
          fmt::format("max |D - brute| {:.2e}, max |p - reference| {:.2e}, "
                      "identical D {}, disjoint D {}",
                      worst_d, worst_p, identical, disjoint)};
}

Outcome MetricIdentities() {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> count(0, 100);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ConfusionMatrix cm{count(rng), count(rng), count(rng), count(rng)};
    const PerformanceMetrics m = DeriveMetrics(cm);
    if (m.fpr && m.fnr) worst = std::max(worst, std::abs(*m.ber - (*m.fpr + *m.fnr) / 2));
    if (m.recall) worst = std::max(worst, std::abs(*m.recall + *m.fnr - 1.0));
    if (m.fpr) worst = std::max(worst, std::abs(*m.fpr + *m.specificity - 1.0));
  }
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    testing::RandomScores(rng, 300, scores, labels, trial % 2 == 0);
    std::int64_t previous = std::numeric_limits<std::int64_t>::max();
    for (int i = 0; i < 50; ++i) {
      const std::int64_t positives =
          Confusion(scores, labels, i / 49.0).predicted_positive();
      if (positives > previous) ++violations;
      previous = positives;
    }
  }
  return {worst <= 1e-12 && violations == 0,
          fmt::format("max identity error {:.2e}; {} monotonicity violations",
                      worst, violations)};
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / "fairthresh_acceptance") {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }
  std::string Path(const std::string& name) const {
    return (dir_ / name).string();
  }
  int Run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::RunCli(args, out, err);
    if (code != 0) fmt::print(stderr, "{}", err.str());
    return code;
  }

 private:
  fs::path dir_;
};

void WriteBatteryFiles(const Workspace& ws, std::uint64_t seed,
                       const std::string& name) {
  const std::vector<Record> records =
      GenerateSynthetic(testing::ShiftedBattery(60), seed);
  std::ofstream out(ws.Path(name), std::ios::binary);
  WriteRecords(out, records, InputFormat::kCsv, kBoth);
  std::ofstream(ws.Path("config.yaml"))
      << "ingest:\n  attribute_columns: [length, personality]\n";
}

Outcome Determinism() {
  Workspace ws;
  WriteBatteryFiles(ws, 606, "train.csv");
  for (const char* name : {"a", "b"}) {
    if (ws.Run({"optimize", "--method", "fairopt", "--config",
                ws.Path("config.yaml"), "--input", ws.Path("train.csv"),
                "--seed", "7", "--output", ws.Path(std::string(name) + ".json")}) !=
        0) {
      return {false, "optimize failed"};
    }
  }
  const std::string ja = Slurp(ws.Path("a.json"));
  const std::string ta = Slurp(ws.Path("a.trace.csv"));
  const bool pass = !ja.empty() && !ta.empty() &&
                    ja == Slurp(ws.Path("b.json")) &&
                    ta == Slurp(ws.Path("b.trace.csv"));
  return {pass, fmt::format("map {} bytes, trace {} bytes, identical: {}",
                            ja.size(), ta.size(), pass)};
}

Outcome TerminationBattery() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int runs = 0, bad_reason = 0, over_budget = 0, out_of_bounds = 0;
  for (int trial = 0; trial < 40; ++trial) {
    OptimizerConfig config;
    config.clip_lower = 0.4 * unit(rng);
    config.clip_upper = 0.6 + 0.4 * unit(rng);
    config.theta_init =
        config.clip_lower + (config.clip_upper - config.clip_lower) * unit(rng);
    config.learning_rate = std::pow(10.0, -4.0 + 4.0 * unit(rng));
    config.fd_step = std::pow(10.0, -3.5 + 2.5 * unit(rng));
    config.max_iterations = 1 + static_cast<std::int64_t>(rng() % 2000);
    config.stagnation_patience = 1 + static_cast<std::int64_t>(rng() % 100);
    config.tol = std::pow(10.0, -8.0 + 7.0 * unit(rng));
    config.penalty_weight = 40.0 * unit(rng);
    config.fairness_gap = unit(rng);
    if (trial % 3 == 1) config.fairness_metrics = {FairnessMetric::kEqualizedOdds};
    if (trial % 3 == 2) {
      config.fairness_metrics = {FairnessMetric::kDemographicParity,
                                 FairnessMetric::kEqualizedOdds};
    }
    const auto grouped = GroupedDataset::Partition(
        GenerateSynthetic(testing::ShiftedBattery(10 + rng() % 60), 1000 + trial),
        kBoth);
    const OptimizeResult result = Optimize(grouped, config);
    ++runs;
    if (result.trace.reason == Termination::kContinue) ++bad_reason;
    if (result.trace.iterations > config.max_iterations) ++over_budget;
    for (const TraceEntry& entry : result.trace.entries) {
      for (const GroupSnapshot& g : entry.groups) {
        if (g.theta < config.clip_lower || g.theta > config.clip_upper) {
          ++out_of_bounds;
        }
      }
    }
    for (const auto& [key, theta] : result.map.thresholds) {
      if (theta < config.clip_lower || theta > config.clip_upper) ++out_of_bounds;
    }
  }
  return {bad_reason == 0 && over_budget == 0 && out_of_bounds == 0,
          fmt::format("{} runs: {} without a final reason, {} over budget, {} "
                      "thresholds outside [a,b]",
                      runs, bad_reason, over_budget, out_of_bounds)};
}

Outcome FormatFidelity() {
  const auto grouped = GroupedDataset::Partition(
      GenerateSynthetic(testing::ShiftedBattery(5), 808), kBoth);
  std::vector<GroupKey> keys;
  for (const auto& [key, rows] : grouped.groups()) keys.push_back(key);
  const std::string static_json =
      RenderThresholdMapJson(StaticThreshold(0.5, keys, kBoth));
  OptimizerConfig config;
  config.max_iterations = 50;
  const std::string fair_json =
      RenderThresholdMapJson(Optimize(grouped, config).map);
  int static_hits = 0, fair_hits = 0;
  for (const auto& l : kLengths) {
    for (const auto& p : kPersonalities) {
      const std::string key = "\"" + l + "_" + p + "\": ";
      if (static_json.find(key + "0.5000000") != std::string::npos) ++static_hits;
      const std::regex pattern(key + "[01]\\.[0-9]{7}[,\\n]");
      if (std::regex_search(fair_json, pattern)) ++fair_hits;
    }
  }
  return {static_hits == 15 && fair_hits == 15,
          fmt::format("static entries at 0.5000000: {}/15; fairopt entries "
                      "with 7 decimals: {}/15",
                      static_hits, fair_hits)};
}

Outcome SweepIntegrity() {
  const auto train = GroupedDataset::Partition(
      GenerateSynthetic(testing::ShiftedBattery(60), 909), kBoth);
  const auto test = GenerateSynthetic(testing::ShiftedBattery(60), 910);
  const std::vector<double> schedule = DefaultDisparitySchedule();
  // Run to a fixed point so the unconstrained budget reports the optimum
  // rather than an early stop.
  OptimizerConfig config;
  config.tol = 1e-12;
  const auto points = TradeoffSweep(train, test, config, schedule);
  bool pass = points.size() == 8;
  double best_tight = -1.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!points[i].error.empty() || !points[i].acc) continue;
    best_tight = std::max(best_tight, *points[i].acc);
  }
  const double free_acc = points.empty() ? -1.0 : points[0].acc.value_or(-1.0);
  if (!(free_acc >= best_tight - 1e-9)) pass = false;

  // Same sweep at the stock tolerance, reported for reference only.
  const auto stock = TradeoffSweep(train, test, OptimizerConfig{}, schedule);
  double stock_tight = -1.0;
  for (std::size_t i = 1; i < stock.size(); ++i) {
    stock_tight = std::max(stock_tight, stock[i].acc.value_or(-1.0));
  }
  return {pass, fmt::format("{} rows; budget 1.00 ACC {:.6f} vs best tighter "
                            "{:.6f} (tol 1e-12); at tol 1e-2: {:.6f} vs {:.6f}",
                            points.size(), free_acc, best_tight,
                            stock.empty() ? -1.0 : stock[0].acc.value_or(-1.0),
                            stock_tight)};
}

std::vector<std::vector<std::string>> ReadCsv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(Slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

double Gap(const std::string& text, std::optional<double> expected) {
  if (!expected) return text.empty() ? 0.0 : kInf;
  if (text.empty()) return kInf;
  return std::abs(std::stod(text) - *expected);
}

Outcome EndToEndEqualsLibrary() {
  Workspace ws;
  WriteBatteryFiles(ws, 1010, "data.csv");
  const std::vector<Record> records =
      GenerateSynthetic(testing::ShiftedBattery(60), 1010);
  const auto grouped = GroupedDataset::Partition(records, kBoth);

  if (ws.Run({"analyze", "--config", ws.Path("config.yaml"), "--input",
              ws.Path("data.csv"), "--output", ws.Path("ks.csv")}) != 0) {
    return {false, "analyze failed"};
  }
  const auto pairs = PairwiseDiscrepancy(grouped);
  const auto ks_rows = ReadCsv(ws.Path("ks.csv"));
  double worst = 0.0;
  bool shape = ks_rows.size() == pairs.size() + 1;
  for (std::size_t i = 0; shape && i < pairs.size(); ++i) {
    const auto& row = ks_rows[i + 1];
    shape = row.size() == 6 && row[0] == pairs[i].group_a.ToString() &&
            row[1] == pairs[i].group_b.ToString();
    if (!shape) break;
    worst = std::max(worst, Gap(row[2], pairs[i].result.statistic));
    worst = std::max(worst, Gap(row[3], pairs[i].result.p_value));
  }

  std::vector<GroupKey> keys;
  for (const auto& [key, rows] : grouped.groups()) keys.push_back(key);
  OptimizerConfig config;
  config.max_iterations = 300;
  const std::vector<NamedMap> maps = {
      {"static", StaticThreshold(0.5, keys, kBoth)},
      {"fairopt", Optimize(grouped, config).map}};
  WriteThresholdMapFile(ws.Path("static.json"), maps[0].map);
  WriteThresholdMapFile(ws.Path("fairopt.json"), maps[1].map);
  if (ws.Run({"evaluate", "--config", ws.Path("config.yaml"), "--input",
              ws.Path("data.csv"), "--output", ws.Path("report.csv"),
              ws.Path("static.json"), ws.Path("fairopt.json")}) != 0) {
    return {false, "evaluate failed"};
  }
  // The CLI sees the maps as written, with 7-decimal thresholds.
  const std::vector<NamedMap> written = {
      {"static", ReadThresholdMapFile(ws.Path("static.json"))},
      {"fairopt", ReadThresholdMapFile(ws.Path("fairopt.json"))}};
  const EvaluationReport report = ComparativeReport(records, written, kBoth);
  const auto rows = ReadCsv(ws.Path("report.csv"));
  shape = shape && rows.size() == 3;
  for (std::size_t i = 0; shape && i < report.methods.size(); ++i) {
    const MethodBlock& block = report.methods[i];
    const auto& row = rows[i + 1];
    shape = row.size() == 7 && row[0] == block.method;
    if (!shape) break;
    worst = std::max(worst, Gap(row[1], block.overall.f1));
    worst = std::max(worst, Gap(row[2], block.overall.accuracy));
    worst = std::max(worst, Gap(row[3], block.ber_discrepancy.at("length")));
    worst = std::max(worst, Gap(row[4], block.ber_discrepancy.at("personality")));
    worst = std::max(worst, Gap(row[5], block.overall.fpr));
    worst = std::max(worst, Gap(row[6], block.overall.ber));
  }
  return {shape && worst <= 1e-12,
          fmt::format("{} KS rows and {} report rows; max |cli - library| "
                      "{:.2e}",
                      ks_rows.size() - 1, rows.size() - 1, worst)};
}

}  // namespace
}  // namespace fairthresh::acceptance

int main() {
  using namespace fairthresh::acceptance;
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"grid-search oracle equivalence", GridOracleEquivalence},
      {"fairness-gap reduction", FairnessGapReduction},
      {"roc-fpr soundness", RocFprSoundness},
      {"ks correctness", KsCorrectness},
      {"metric identities", MetricIdentities},
      {"determinism", Determinism},
      {"termination", TerminationBattery},
      {"format fidelity", FormatFidelity},
      {"sweep integrity", SweepIntegrity},
      {"end-to-end equals library", EndToEndEqualsLibrary},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failed;
    fmt::print("{} {:2} {}: {}\n", outcome.pass ? "PASS" : "FAIL", i + 1,
               criteria[i].name, outcome.detail);
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failed,
             criteria.size());
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
