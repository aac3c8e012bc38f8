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

#ifndef FAIRTHRESH_TESTING_FIXTURES_H_
#define FAIRTHRESH_TESTING_FIXTURES_H_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fairthresh/ingest.h"
#include "fairthresh/synthetic.h"

namespace fairthresh::testing {

inline const std::array<std::string, 3> kLengths = {"short", "medium", "long"};
inline const std::array<std::string, 5> kPersonalities = {
    "extroversion", "neuroticism", "agreeableness", "conscientiousness",
    "openness"};

inline GroupKey LengthPersonalityKey(const std::string& length,
                                     const std::string& personality) {
  return GroupKey(std::vector<GroupKey::Part>{{"length", length}, {"personality", personality}});
}

// 15 length x personality groups whose Beta parameters drift with both
// attributes, so a single threshold treats them unevenly.
inline std::vector<SyntheticGroupSpec> ShiftedBattery(std::int64_t per_class) {
  std::vector<SyntheticGroupSpec> spec;
  for (std::size_t l = 0; l < kLengths.size(); ++l) {
    for (std::size_t p = 0; p < kPersonalities.size(); ++p) {
      const double shift = 0.9 * static_cast<double>(l) + 0.45 * static_cast<double>(p);
      SyntheticGroupSpec g;
      g.key = LengthPersonalityKey(kLengths[l], kPersonalities[p]);
      g.n_human = per_class;
      g.n_ai = per_class;
      g.human = {2.0, 3.0 + shift};
      g.ai = {2.5 + 0.6 * shift, 2.5};
      spec.push_back(g);
    }
  }
  return spec;
}

// Random scores in [0, 1] with labels; ties are common by construction so
// threshold edge cases get exercised.
inline void RandomScores(std::mt19937_64& rng, std::size_t n,
                         std::vector<double>& scores, std::vector<int>& labels,
                         bool coarse = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> grid(0, 20);
  scores.resize(n);
  labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = coarse ? grid(rng) / 20.0 : unit(rng);
    labels[i] = coin(rng);
  }
}

}  // namespace fairthresh::testing

#endif  // FAIRTHRESH_TESTING_FIXTURES_H_
