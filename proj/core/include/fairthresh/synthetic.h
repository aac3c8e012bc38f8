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

#ifndef FAIRTHRESH_SYNTHETIC_H_
#define FAIRTHRESH_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairthresh/ingest.h"

namespace fairthresh {

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

struct SyntheticGroupSpec {
  GroupKey key;
  std::size_t n_human = 0;
  std::size_t n_ai = 0;
  BetaParams human;
  BetaParams ai;
};

// Deterministic for a given seed. Per group, emits n_human records with label
// 0 followed by n_ai records with label 1; scores are Beta draws rounded to 7
// decimals. Ids are "syn-<index>".
std::vector<Record> GenerateSynthetic(std::span<const SyntheticGroupSpec> spec,
                                      std::uint64_t seed);

}  // namespace fairthresh

#endif  // FAIRTHRESH_SYNTHETIC_H_
