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

// RFC 4180 style field splitting for single-line records.

#ifndef FAIRTHRESH_SRC_CSV_H_
#define FAIRTHRESH_SRC_CSV_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairthresh::internal {

// Quoted fields may contain commas and doubled quotes, not line breaks.
// `row` only feeds error messages.
std::vector<std::string> SplitCsvLine(std::string_view line, std::size_t row);

std::string EscapeCsvField(std::string_view field);
std::string JoinCsvLine(std::span<const std::string> fields);

}  // namespace fairthresh::internal

#endif  // FAIRTHRESH_SRC_CSV_H_
