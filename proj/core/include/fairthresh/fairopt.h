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

// Group-adaptive threshold optimization.
//
// Every subgroup starts at `theta_init`. One sweep evaluates, for every group
// against the thresholds of the previous sweep,
//
//   loss(theta)     = -ACC(theta) + penalty * max(0, f1_floor - F1(theta))
//   gradient(theta) = (loss(theta + h) - loss(theta - h)) / (2h)
//   theta'          = clip(theta - learning_rate * gradient, lower, upper)
//
// and then replaces all thresholds at once. Fairness does not enter the loss;
// it only gates termination. A run converges when the largest threshold
// change of a sweep is below `tol`, every group meets the accuracy and F1
// floors, and every selected fairness disparity is at most `fairness_gap`.

#ifndef FAIRTHRESH_FAIROPT_H_
#define FAIRTHRESH_FAIROPT_H_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairthresh/ingest.h"
#include "fairthresh/threshold_map.h"

namespace fairthresh {

enum class FairnessMetric { kDemographicParity, kEqualizedOdds };

std::string_view FairnessMetricName(FairnessMetric metric);
std::optional<FairnessMetric> ParseFairnessMetric(std::string_view name);

struct OptimizerConfig {
  double theta_init = 0.5;
  double learning_rate = 1e-3;
  std::int64_t max_iterations = 100000;
  double fd_step = 1e-3;
  double acc_floor = 0.25;
  double f1_floor = 0.25;
  double penalty_weight = 20.0;
  // May be +infinity to disable the fairness gate.
  double fairness_gap = 0.2;
  std::vector<FairnessMetric> fairness_metrics = {
      FairnessMetric::kDemographicParity};
  double clip_lower = 0.1;
  double clip_upper = 0.9;
  double tol = 1e-2;
  std::int64_t stagnation_patience = 50;
  // Reported, not enforced.
  double relaxed_ratio = 0.8;
  // Keep every `trace_stride`-th sweep in the trace; the last is always kept.
  std::int64_t trace_stride = 1;

  void Validate() const;
  // One "name=value" line per field, values printed round-trip exact.
  std::string Canonical() const;
  std::string Fingerprint() const;
};

// Throws ValidationError for an empty group.
double GroupLoss(std::span<const double> scores, std::span<const int> labels,
                 double theta, double f1_floor, double penalty_weight);

// Central difference with both probes clamped into [0, 1].
double FdGradient(std::span<const double> scores, std::span<const int> labels,
                  double theta, double fd_step, double f1_floor,
                  double penalty_weight);

double Step(double theta, double gradient, double learning_rate, double lower,
            double upper);

enum class Termination { kContinue, kConverged, kStagnated, kMaxIterations };

std::string_view TerminationName(Termination reason);

// Per-group performance at the thresholds of one sweep, plus the inter-group
// disparities of the selected fairness metrics.
struct SweepMetrics {
  std::map<std::string, double> acc;
  // Undefined F1 is stored as 0.
  std::map<std::string, double> f1;
  std::map<FairnessMetric, double> disparity;
};

// Threshold movement, performance floors and fairness gap all satisfied.
bool IsConverged(const ThresholdMap& previous, const ThresholdMap& current,
                 const SweepMetrics& metrics, const OptimizerConfig& config);

// Tracks consecutive sweeps in which per-group ACC, per-group F1 and the
// maximum demographic-parity disparity all moved by less than `tol`.
class TerminationMonitor {
 public:
  explicit TerminationMonitor(const OptimizerConfig& config)
      : config_(config) {}

  // `max_dp_disparity` is tracked for stagnation even when demographic
  // parity is not a selected gate metric.
  Termination Check(const ThresholdMap& previous, const ThresholdMap& current,
                    const SweepMetrics& metrics, double max_dp_disparity);

  std::int64_t quiet_sweeps() const { return quiet_sweeps_; }

 private:
  OptimizerConfig config_;
  std::optional<SweepMetrics> last_metrics_;
  double last_dp_ = 0.0;
  std::int64_t quiet_sweeps_ = 0;
};

struct GroupSnapshot {
  double theta = 0.0;
  double acc = 0.0;
  std::optional<double> f1;
  double loss = 0.0;
};

struct TraceEntry {
  std::int64_t iteration = 0;
  // Parallel to OptimizerTrace::group_keys.
  std::vector<GroupSnapshot> groups;
  double delta_dp = 0.0;
  double delta_eo = 0.0;
  double delta_theta = 0.0;
};

struct OptimizerTrace {
  std::vector<std::string> group_keys;
  std::vector<TraceEntry> entries;
  Termination reason = Termination::kContinue;
  std::int64_t iterations = 0;
};

struct OptimizeResult {
  ThresholdMap map;
  OptimizerTrace trace;
};

OptimizeResult Optimize(const GroupedDataset& grouped,
                        const OptimizerConfig& config);

// iteration,group_key,theta,acc,f1,loss,delta_dp,delta_theta
void WriteTraceCsv(std::ostream& output, const OptimizerTrace& trace);

}  // namespace fairthresh

#endif  // FAIRTHRESH_FAIROPT_H_
