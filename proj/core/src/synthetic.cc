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

#include "fairthresh/synthetic.h"

#include <algorithm>
#include <cmath>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <fmt/core.h>

#include "fairthresh/error.h"

namespace fairthresh {
namespace {

void CheckParams(const BetaParams& params, const GroupKey& key) {
  if (!(params.a > 0.0) || !(params.b > 0.0) || !std::isfinite(params.a) ||
      !std::isfinite(params.b)) {
    throw ValidationError(fmt::format(
        "synthetic group '{}': Beta parameters must be positive, got ({}, {})",
        key.ToString(), params.a, params.b));
  }
}

}  // namespace

std::vector<Record> GenerateSynthetic(std::span<const SyntheticGroupSpec> spec,
                                      std::uint64_t seed) {
  for (const auto& group : spec) {
    CheckParams(group.human, group.key);
    CheckParams(group.ai, group.key);
  }
  // boost distributions, unlike std ones, produce the same stream on every
  // standard library.
  boost::random::mt19937_64 engine(seed);
  std::vector<Record> records;
  std::size_t next_id = 0;
  const auto emit = [&](const SyntheticGroupSpec& group, std::size_t count,
                        const BetaParams& params, int label) {
    boost::random::beta_distribution<double> beta(params.a, params.b);
    for (std::size_t i = 0; i < count; ++i) {
      Record record;
      record.id = fmt::format("syn-{:06d}", next_id++);
      record.score = std::clamp(RoundTo7(beta(engine)), 0.0, 1.0);
      record.label = label;
      for (const auto& [attribute, category] : group.key.parts()) {
        record.attributes[attribute] = category;
      }
      records.push_back(std::move(record));
    }
  };
  for (const auto& group : spec) {
    emit(group, group.n_human, group.human, 0);
    emit(group, group.n_ai, group.ai, 1);
  }
  return records;
}

}  // namespace fairthresh
