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

#include "fairthresh/stats.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/core.h>

#include "csv.h"
#include "fairthresh/error.h"

namespace fairthresh {

double KolmogorovTail(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  constexpr double kTermCutoff = 1e-10;
  constexpr int kMaxTerms = 1000000;
  const double a2 = -2.0 * lambda * lambda;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= kMaxTerms; ++k) {
    const double term = 2.0 * sign * std::exp(a2 * k * k);
    sum += term;
    if (std::fabs(term) < kTermCutoff) break;
    sign = -sign;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult KsTwoSample(std::span<const double> sample_a,
                     std::span<const double> sample_b) {
  if (sample_a.empty() || sample_b.empty()) {
    throw ValidationError("KS test needs two non-empty samples");
  }
  std::vector<double> a(sample_a.begin(), sample_a.end());
  std::vector<double> b(sample_b.begin(), sample_b.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());

  // Merge walk: after consuming every value <= x from both samples the
  // counts are the right-continuous ECDFs at x.
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n -
                              static_cast<double>(j) / m));
  }

  KsResult result;
  result.statistic = d;
  result.n = a.size();
  result.m = b.size();
  const double sqrt_ne = std::sqrt(n * m / (n + m));
  result.p_value = KolmogorovTail((sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d);
  return result;
}

std::vector<KsPair> PairwiseDiscrepancy(const GroupedDataset& grouped,
                                        std::size_t min_group_size) {
  std::vector<std::pair<GroupKey, std::vector<double>>> eligible;
  for (const auto& [key, indices] : grouped.groups()) {
    if (indices.size() < min_group_size) continue;
    eligible.emplace_back(key, grouped.Gather(key).scores);
  }
  if (eligible.size() < 2) {
    throw ValidationError(fmt::format(
        "pairwise discrepancy needs at least two groups with >= {} records, "
        "found {}",
        min_group_size, eligible.size()));
  }
  std::vector<KsPair> pairs;
  pairs.reserve(eligible.size() * (eligible.size() - 1) / 2);
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    for (std::size_t j = i + 1; j < eligible.size(); ++j) {
      pairs.push_back({eligible[i].first, eligible[j].first,
                       KsTwoSample(eligible[i].second, eligible[j].second)});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const KsPair& x, const KsPair& y) {
    if (x.result.statistic != y.result.statistic) {
      return x.result.statistic > y.result.statistic;
    }
    if (x.group_a != y.group_a) return x.group_a < y.group_a;
    return x.group_b < y.group_b;
  });
  return pairs;
}

void WritePairwiseCsv(std::ostream& output, std::span<const KsPair> pairs) {
  output << "group_a,group_b,ks_statistic,p_value,n,m\n";
  for (const auto& pair : pairs) {
    output << fmt::format("{},{},{:.17g},{:.17g},{},{}\n",
                          internal::EscapeCsvField(pair.group_a.ToString()),
                          internal::EscapeCsvField(pair.group_b.ToString()),
                          pair.result.statistic, pair.result.p_value,
                          pair.result.n, pair.result.m);
  }
}

}  // namespace fairthresh
