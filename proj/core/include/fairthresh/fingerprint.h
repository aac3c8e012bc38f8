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

#ifndef FAIRTHRESH_FINGERPRINT_H_
#define FAIRTHRESH_FINGERPRINT_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace fairthresh {

// 64-bit FNV-1a. Stable across platforms, not cryptographic.
std::uint64_t Fnv1a64(std::string_view data);

// Fnv1a64 rendered as 16 lowercase hex digits.
std::string Fingerprint(std::string_view data);

}  // namespace fairthresh

#endif  // FAIRTHRESH_FINGERPRINT_H_
