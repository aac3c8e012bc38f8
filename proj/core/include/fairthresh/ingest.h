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

// Score dataset ingestion: records, schemas, canonical subgroup keys and the
// partition of a record set into subgroups.

#ifndef FAIRTHRESH_INGEST_H_
#define FAIRTHRESH_INGEST_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fairthresh {

// One scored text. `label` is 0 for human-written, 1 for AI-generated.
struct Record {
  std::optional<std::string> id;
  double score = 0.0;
  int label = 0;
  std::map<std::string, std::string> attributes;

  // "id <id>" when an id is present, otherwise "row <row>" (1-based).
  std::string Describe(std::size_t row) const;
};

struct Schema {
  std::string score_column = "score";
  std::string label_column = "label";
  // Read when present in the input; never required.
  std::string id_column = "id";
  std::vector<std::string> attribute_columns;
  // When set, the length attribute is derived from this integer
  // character-count column instead of being read as a category.
  std::optional<std::string> length_char_column;
  std::string length_attribute = "length";

  // All attribute names a parsed record carries, in schema order.
  std::vector<std::string> AttributeNames() const;
  void Validate() const;
};

enum class InputFormat { kCsv, kJsonl };

// ".jsonl"/".ndjson" map to kJsonl, everything else to kCsv.
InputFormat FormatFromPath(const std::filesystem::path& path);
std::optional<InputFormat> ParseInputFormat(std::string_view name);

// Throws ValidationError naming the offending row (1-based, header excluded)
// and column.
std::vector<Record> ParseRecords(std::istream& input, InputFormat format,
                                 const Schema& schema);
std::vector<Record> ReadRecordsFile(const std::filesystem::path& path,
                                    const Schema& schema,
                                    std::optional<InputFormat> format = {});

// Scores are written with 7 decimal places; the id column is emitted only if
// at least one record has an id.
void WriteRecords(std::ostream& output, std::span<const Record> records,
                  InputFormat format, std::span<const std::string> attributes,
                  const Schema& schema = {});

// short (<= 1000), medium (<= 2500), long (> 2500).
std::string_view DeriveLengthCategory(std::int64_t char_count);

// Canonical subgroup identity: (attribute, category) pairs sorted by
// attribute name.
class GroupKey {
 public:
  using Part = std::pair<std::string, std::string>;

  GroupKey() = default;
  explicit GroupKey(std::vector<Part> parts);

  static GroupKey FromRecord(const Record& record,
                             std::span<const std::string> attribute_names,
                             std::size_t row = 0);

  const std::vector<Part>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }

  // Categories joined with '_' in attribute order, e.g. "long_neuroticism".
  std::string ToString() const;

  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
  friend bool operator==(const GroupKey&, const GroupKey&) = default;

 private:
  std::vector<Part> parts_;
};

struct LabeledScores {
  std::vector<double> scores;
  std::vector<int> labels;
};

// A record store plus its partition into non-empty subgroups.
class GroupedDataset {
 public:
  static GroupedDataset Partition(std::vector<Record> records,
                                  std::vector<std::string> attribute_names);

  const std::vector<Record>& records() const { return records_; }
  const std::map<GroupKey, std::vector<std::size_t>>& groups() const {
    return groups_;
  }
  const std::vector<std::string>& attribute_names() const {
    return attribute_names_;
  }
  std::size_t num_groups() const { return groups_.size(); }

  LabeledScores Gather(const GroupKey& key) const;

 private:
  std::vector<Record> records_;
  std::vector<std::string> attribute_names_;
  std::map<GroupKey, std::vector<std::size_t>> groups_;
};

// Round to the 7-decimal precision used for every serialized score.
double RoundTo7(double value);

}  // namespace fairthresh

#endif  // FAIRTHRESH_INGEST_H_
