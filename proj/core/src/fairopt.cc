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

#include "fairthresh/fairopt.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/core.h>

#include "csv.h"
#include "fairthresh/error.h"
#include "fairthresh/fingerprint.h"
#include "fairthresh/metrics.h"

namespace fairthresh {
namespace {

double LossFromConfusion(const ConfusionMatrix& cm, double f1_floor,
                         double penalty_weight) {
  const PerformanceMetrics m = DeriveMetrics(cm);
  // An undefined F1 counts as 0 inside the hinge.
  const double f1 = m.f1.value_or(0.0);
  return -*m.accuracy + penalty_weight * std::max(0.0, f1_floor - f1);
}

void CheckUnit(double value, std::string_view name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ValidationError(
        fmt::format("optimizer config: {} = {} outside [0,1]", name, value));
  }
}

struct OptimizerGroup {
  GroupKey group;
  std::string key;
  SortedScores sorted;
};

}  // namespace

std::string_view FairnessMetricName(FairnessMetric metric) {
  return metric == FairnessMetric::kDemographicParity ? "dp" : "eo";
}

std::optional<FairnessMetric> ParseFairnessMetric(std::string_view name) {
  if (name == "dp" || name == "DP") return FairnessMetric::kDemographicParity;
  if (name == "eo" || name == "EO") return FairnessMetric::kEqualizedOdds;
  return std::nullopt;
}

std::string_view TerminationName(Termination reason) {
  switch (reason) {
    case Termination::kContinue:
      return "continue";
    case Termination::kConverged:
      return "converged";
    case Termination::kStagnated:
      return "stagnation";
    case Termination::kMaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

void OptimizerConfig::Validate() const {
  if (!(clip_lower >= 0.0 && clip_lower < clip_upper && clip_upper <= 1.0)) {
    throw ValidationError(fmt::format(
        "optimizer config: clip bounds [{}, {}] must satisfy 0 <= a < b <= 1",
        clip_lower, clip_upper));
  }
  if (!(theta_init >= clip_lower && theta_init <= clip_upper)) {
    throw ValidationError(fmt::format(
        "optimizer config: theta_init = {} outside clip bounds [{}, {}]",
        theta_init, clip_lower, clip_upper));
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("optimizer config: learning_rate must be > 0");
  }
  if (!(fd_step > 0.0) || !std::isfinite(fd_step)) {
    throw ValidationError("optimizer config: fd_step must be > 0");
  }
  if (!(penalty_weight >= 0.0) || !std::isfinite(penalty_weight)) {
    throw ValidationError("optimizer config: penalty_weight must be >= 0");
  }
  if (!(fairness_gap >= 0.0)) {
    throw ValidationError("optimizer config: fairness_gap must be >= 0");
  }
  if (!(tol >= 0.0) || !std::isfinite(tol)) {
    throw ValidationError("optimizer config: tol must be >= 0");
  }
  CheckUnit(acc_floor, "acc_floor");
  CheckUnit(f1_floor, "f1_floor");
  CheckUnit(relaxed_ratio, "relaxed_ratio");
  if (max_iterations < 1) {
    throw ValidationError("optimizer config: max_iterations must be >= 1");
  }
  if (stagnation_patience < 1) {
    throw ValidationError("optimizer config: stagnation_patience must be >= 1");
  }
  if (trace_stride < 1) {
    throw ValidationError("optimizer config: trace_stride must be >= 1");
  }
}

std::string OptimizerConfig::Canonical() const {
  std::string metrics;
  for (const auto metric : fairness_metrics) {
    if (!metrics.empty()) metrics += ',';
    metrics += FairnessMetricName(metric);
  }
  return fmt::format(
      "theta_init={:.17g}\nlearning_rate={:.17g}\nmax_iterations={}\n"
      "fd_step={:.17g}\nacc_floor={:.17g}\nf1_floor={:.17g}\n"
      "penalty_weight={:.17g}\nfairness_gap={:.17g}\nfairness_metrics={}\n"
      "clip_lower={:.17g}\nclip_upper={:.17g}\ntol={:.17g}\n"
      "stagnation_patience={}\nrelaxed_ratio={:.17g}\n",
      theta_init, learning_rate, max_iterations, fd_step, acc_floor, f1_floor,
      penalty_weight, fairness_gap, metrics, clip_lower, clip_upper, tol,
      stagnation_patience, relaxed_ratio);
}

std::string OptimizerConfig::Fingerprint() const {
  return fairthresh::Fingerprint(Canonical());
}

double GroupLoss(std::span<const double> scores, std::span<const int> labels,
                 double theta, double f1_floor, double penalty_weight) {
  if (scores.empty()) throw ValidationError("loss of an empty group");
  return LossFromConfusion(Confusion(scores, labels, theta), f1_floor,
                           penalty_weight);
}

double FdGradient(std::span<const double> scores, std::span<const int> labels,
                  double theta, double fd_step, double f1_floor,
                  double penalty_weight) {
  const double up = std::min(1.0, theta + fd_step);
  const double down = std::max(0.0, theta - fd_step);
  return (GroupLoss(scores, labels, up, f1_floor, penalty_weight) -
          GroupLoss(scores, labels, down, f1_floor, penalty_weight)) /
         (2.0 * fd_step);
}

double Step(double theta, double gradient, double learning_rate, double lower,
            double upper) {
  return std::clamp(theta - learning_rate * gradient, lower, upper);
}

bool IsConverged(const ThresholdMap& previous, const ThresholdMap& current,
                 const SweepMetrics& metrics, const OptimizerConfig& config) {
  double delta_theta = 0.0;
  for (const auto& [key, theta] : current.thresholds) {
    delta_theta =
        std::max(delta_theta, std::fabs(theta - previous.ThresholdFor(key)));
  }
  if (!(delta_theta < config.tol)) return false;
  for (const auto& [key, acc] : metrics.acc) {
    if (acc < config.acc_floor) return false;
  }
  for (const auto& [key, f1] : metrics.f1) {
    if (f1 < config.f1_floor) return false;
  }
  for (const auto metric : config.fairness_metrics) {
    const auto it = metrics.disparity.find(metric);
    if (it == metrics.disparity.end() || it->second > config.fairness_gap) {
      return false;
    }
  }
  return true;
}

Termination TerminationMonitor::Check(const ThresholdMap& previous,
                                      const ThresholdMap& current,
                                      const SweepMetrics& metrics,
                                      double max_dp_disparity) {
  if (IsConverged(previous, current, metrics, config_)) {
    return Termination::kConverged;
  }
  if (last_metrics_) {
    const auto max_change = [](const std::map<std::string, double>& a,
                               const std::map<std::string, double>& b) {
      double out = 0.0;
      for (const auto& [key, value] : a) {
        const auto it = b.find(key);
        out = std::max(out, it == b.end() ? 1.0 : std::fabs(value - it->second));
      }
      return out;
    };
    const bool quiet =
        max_change(metrics.acc, last_metrics_->acc) < config_.tol &&
        max_change(metrics.f1, last_metrics_->f1) < config_.tol &&
        std::fabs(max_dp_disparity - last_dp_) < config_.tol;
    quiet_sweeps_ = quiet ? quiet_sweeps_ + 1 : 0;
  }
  last_metrics_ = metrics;
  last_dp_ = max_dp_disparity;
  return quiet_sweeps_ >= config_.stagnation_patience ? Termination::kStagnated
                                                      : Termination::kContinue;
}

OptimizeResult Optimize(const GroupedDataset& grouped,
                        const OptimizerConfig& config) {
  config.Validate();
  if (grouped.num_groups() == 0) {
    throw ValidationError("optimize: the grouped dataset is empty");
  }
  std::vector<OptimizerGroup> groups;
  groups.reserve(grouped.num_groups());
  for (const auto& [key, indices] : grouped.groups()) {
    const LabeledScores data = grouped.Gather(key);
    groups.push_back(
        {key, key.ToString(), SortedScores(data.scores, data.labels)});
  }

  OptimizeResult result;
  ThresholdMap& current = result.map;
  current.method = Method::kFairOpt;
  current.attributes = grouped.attribute_names();
  current.fallback = config.theta_init;
  current.config_fingerprint = config.Fingerprint();
  for (const auto& group : groups) {
    current.thresholds[group.key] = config.theta_init;
  }

  OptimizerTrace& trace = result.trace;
  for (const auto& group : groups) trace.group_keys.push_back(group.key);

  const auto loss_at = [&](const OptimizerGroup& group, double theta) {
    return LossFromConfusion(group.sorted.ConfusionAt(theta), config.f1_floor,
                             config.penalty_weight);
  };

  TerminationMonitor monitor(config);
  for (std::int64_t iteration = 1; iteration <= config.max_iterations;
       ++iteration) {
    // Every group steps from the previous sweep's thresholds.
    ThresholdMap next = current;
    double delta_theta = 0.0;
    for (const auto& group : groups) {
      const double theta = current.thresholds.at(group.key);
      const double up = std::min(1.0, theta + config.fd_step);
      const double down = std::max(0.0, theta - config.fd_step);
      const double gradient =
          (loss_at(group, up) - loss_at(group, down)) / (2.0 * config.fd_step);
      const double updated = Step(theta, gradient, config.learning_rate,
                                  config.clip_lower, config.clip_upper);
      next.thresholds[group.key] = updated;
      delta_theta = std::max(delta_theta, std::fabs(updated - theta));
    }

    SweepMetrics metrics;
    GroupRates positive_rate;
    OptionalGroupRates tpr;
    OptionalGroupRates fpr;
    TraceEntry entry;
    entry.iteration = iteration;
    entry.delta_theta = delta_theta;
    entry.groups.reserve(groups.size());
    for (const auto& group : groups) {
      const double theta = next.thresholds.at(group.key);
      const ConfusionMatrix cm = group.sorted.ConfusionAt(theta);
      const PerformanceMetrics m = DeriveMetrics(cm);
      metrics.acc[group.key] = *m.accuracy;
      metrics.f1[group.key] = m.f1.value_or(0.0);
      positive_rate[group.group] = *PositiveRate(cm);
      tpr[group.group] = m.recall;
      fpr[group.group] = m.fpr;
      entry.groups.push_back(
          {theta, *m.accuracy, m.f1,
           LossFromConfusion(cm, config.f1_floor, config.penalty_weight)});
    }
    entry.delta_dp = DemographicParityGap(positive_rate);
    entry.delta_eo = EqualizedOddsGap(tpr, fpr);
    for (const auto metric : config.fairness_metrics) {
      metrics.disparity[metric] =
          metric == FairnessMetric::kDemographicParity ? entry.delta_dp
                                                       : entry.delta_eo;
    }

    Termination reason = monitor.Check(current, next, metrics, entry.delta_dp);
    if (reason == Termination::kContinue &&
        iteration == config.max_iterations) {
      reason = Termination::kMaxIterations;
    }
    if (iteration % config.trace_stride == 0 ||
        reason != Termination::kContinue) {
      trace.entries.push_back(std::move(entry));
    }
    current = std::move(next);
    trace.iterations = iteration;
    if (reason != Termination::kContinue) {
      trace.reason = reason;
      break;
    }
  }
  return result;
}

void WriteTraceCsv(std::ostream& output, const OptimizerTrace& trace) {
  output << "iteration,group_key,theta,acc,f1,loss,delta_dp,delta_theta\n";
  for (const auto& entry : trace.entries) {
    for (std::size_t g = 0; g < entry.groups.size(); ++g) {
      const GroupSnapshot& s = entry.groups[g];
      output << fmt::format(
          "{},{},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g}\n", entry.iteration,
          internal::EscapeCsvField(trace.group_keys[g]), s.theta, s.acc,
          s.f1 ? fmt::format("{:.17g}", *s.f1) : std::string(), s.loss,
          entry.delta_dp, entry.delta_theta);
    }
  }
}

}  // namespace fairthresh
