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

// Two-sample Kolmogorov-Smirnov testing of subgroup score distributions.

#ifndef FAIRTHRESH_STATS_H_
#define FAIRTHRESH_STATS_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fairthresh/ingest.h"

namespace fairthresh {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t m = 0;
};

// Two-sided asymptotic tail Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2
// lambda^2), summed until a term falls below 1e-10 and clamped to [0, 1].
// Q(0) = 1.
double KolmogorovTail(double lambda);

// D = sup |ECDF_a - ECDF_b| over the pooled sample points (right-continuous
// ECDFs). The p-value uses the effective-size corrected lambda
// (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) * D with ne = nm / (n + m).
KsResult KsTwoSample(std::span<const double> sample_a,
                     std::span<const double> sample_b);

struct KsPair {
  GroupKey group_a;
  GroupKey group_b;
  KsResult result;
};

inline constexpr std::size_t kDefaultMinGroupSize = 20;

// One test per unordered pair of groups with at least `min_group_size`
// records; group_a < group_b. Sorted by statistic descending, then by
// (group_a, group_b).
std::vector<KsPair> PairwiseDiscrepancy(
    const GroupedDataset& grouped,
    std::size_t min_group_size = kDefaultMinGroupSize);

// group_a,group_b,ks_statistic,p_value,n,m
void WritePairwiseCsv(std::ostream& output, std::span<const KsPair> pairs);

}  // namespace fairthresh

#endif  // FAIRTHRESH_STATS_H_
