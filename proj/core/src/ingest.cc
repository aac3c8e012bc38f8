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

#include "fairthresh/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <system_error>

#include <fmt/core.h>

#include "csv.h"
#include "fairthresh/error.h"
#include "json.hpp"

namespace fairthresh {
namespace {

using nlohmann::json;

bool ParseDouble(std::string_view text, double* value) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), *value);
  return ec == std::errc() && ptr == text.data() + text.size() &&
         std::isfinite(*value);
}

bool ParseInt(std::string_view text, std::int64_t* value) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), *value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

// Raw, still-textual fields of one input row.
struct RawRow {
  std::size_t row = 0;
  std::optional<std::string> id;
  std::string score;
  std::string label;
  std::map<std::string, std::string> attributes;
  std::optional<std::string> char_count;
};

Record BuildRecord(const RawRow& raw, const Schema& schema) {
  Record record;
  record.id = raw.id;
  if (!ParseDouble(raw.score, &record.score)) {
    throw ValidationError(fmt::format(
        "malformed score at row {} (column '{}', value '{}')", raw.row,
        schema.score_column, raw.score));
  }
  if (record.score < 0.0 || record.score > 1.0) {
    throw ValidationError(fmt::format(
        "score out of range [0,1] at row {} (column '{}', value '{}')",
        raw.row, schema.score_column, raw.score));
  }
  if (raw.label == "0") {
    record.label = 0;
  } else if (raw.label == "1") {
    record.label = 1;
  } else {
    throw ValidationError(fmt::format(
        "unknown label value '{}' at row {} (column '{}'; expected 0 or 1)",
        raw.label, raw.row, schema.label_column));
  }
  for (const auto& [name, value] : raw.attributes) {
    if (value.empty()) {
      throw ValidationError(fmt::format(
          "empty attribute at row {} (column '{}')", raw.row, name));
    }
    record.attributes[name] = value;
  }
  if (schema.length_char_column) {
    std::int64_t count = 0;
    if (!raw.char_count || !ParseInt(*raw.char_count, &count) || count < 0) {
      throw ValidationError(fmt::format(
          "malformed character count at row {} (column '{}', value '{}')",
          raw.row, *schema.length_char_column, raw.char_count.value_or("")));
    }
    record.attributes[schema.length_attribute] =
        std::string(DeriveLengthCategory(count));
  }
  return record;
}

std::vector<Record> ParseCsv(std::istream& input, const Schema& schema) {
  std::string line;
  if (!std::getline(input, line)) return {};
  const std::vector<std::string> header = internal::SplitCsvLine(line, 0);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!column.emplace(header[i], i).second) {
      throw ValidationError(
          fmt::format("duplicate column '{}' in CSV header", header[i]));
    }
  }
  const auto require = [&](const std::string& name) {
    const auto it = column.find(name);
    if (it == column.end()) {
      throw ValidationError(
          fmt::format("required column '{}' missing from CSV header", name));
    }
    return it->second;
  };
  const std::size_t score_col = require(schema.score_column);
  const std::size_t label_col = require(schema.label_column);
  std::vector<std::pair<std::string, std::size_t>> attribute_cols;
  for (const auto& name : schema.attribute_columns) {
    attribute_cols.emplace_back(name, require(name));
  }
  std::optional<std::size_t> char_col;
  if (schema.length_char_column) char_col = require(*schema.length_char_column);
  std::optional<std::size_t> id_col;
  if (const auto it = column.find(schema.id_column); it != column.end()) {
    id_col = it->second;
  }

  std::vector<Record> records;
  std::size_t row = 0;
  while (std::getline(input, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const std::vector<std::string> fields = internal::SplitCsvLine(line, row);
    if (fields.size() != header.size()) {
      throw ValidationError(fmt::format(
          "malformed row {}: expected {} fields, found {}", row,
          header.size(), fields.size()));
    }
    RawRow raw;
    raw.row = row;
    if (id_col && !fields[*id_col].empty()) raw.id = fields[*id_col];
    raw.score = fields[score_col];
    raw.label = fields[label_col];
    for (const auto& [name, index] : attribute_cols) {
      raw.attributes[name] = fields[index];
    }
    if (char_col) raw.char_count = fields[*char_col];
    records.push_back(BuildRecord(raw, schema));
  }
  return records;
}

std::string JsonScalarText(const json& value, std::size_t row,
                           const std::string& name) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "1" : "0";
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number()) return value.dump();
  throw ValidationError(fmt::format(
      "malformed row {}: column '{}' is not a scalar", row, name));
}

std::vector<Record> ParseJsonl(std::istream& input, const Schema& schema) {
  std::vector<Record> records;
  std::string line;
  std::size_t row = 0;
  while (std::getline(input, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++row;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(
          fmt::format("malformed row {}: {}", row, e.what()));
    }
    if (!object.is_object()) {
      throw ValidationError(
          fmt::format("malformed row {}: expected a JSON object", row));
    }
    const auto field = [&](const std::string& name) -> std::string {
      const auto it = object.find(name);
      if (it == object.end() || it->is_null()) {
        throw ValidationError(fmt::format(
            "malformed row {}: missing column '{}'", row, name));
      }
      return JsonScalarText(*it, row, name);
    };
    RawRow raw;
    raw.row = row;
    if (const auto it = object.find(schema.id_column);
        it != object.end() && !it->is_null()) {
      raw.id = JsonScalarText(*it, row, schema.id_column);
    }
    const auto score = object.find(schema.score_column);
    if (score != object.end() && score->is_number_float()) {
      // Keep the exact literal so the full precision survives.
      raw.score = score->dump();
    } else {
      raw.score = field(schema.score_column);
    }
    raw.label = field(schema.label_column);
    for (const auto& name : schema.attribute_columns) {
      raw.attributes[name] = field(name);
    }
    if (schema.length_char_column) {
      raw.char_count = field(*schema.length_char_column);
    }
    records.push_back(BuildRecord(raw, schema));
  }
  return records;
}

std::string FormatScore(double score) { return fmt::format("{:.7f}", score); }

}  // namespace

std::string Record::Describe(std::size_t row) const {
  if (id) return fmt::format("id {}", *id);
  return fmt::format("row {}", row);
}

std::vector<std::string> Schema::AttributeNames() const {
  std::vector<std::string> names = attribute_columns;
  if (length_char_column &&
      std::find(names.begin(), names.end(), length_attribute) == names.end()) {
    names.push_back(length_attribute);
  }
  return names;
}

void Schema::Validate() const {
  std::set<std::string> seen;
  const auto add = [&](const std::string& name, std::string_view role) {
    if (name.empty()) {
      throw ValidationError(fmt::format("schema: empty {} column name", role));
    }
    if (!seen.insert(name).second) {
      throw ValidationError(
          fmt::format("schema: column '{}' used more than once", name));
    }
  };
  add(score_column, "score");
  add(label_column, "label");
  add(id_column, "id");
  for (const auto& name : attribute_columns) add(name, "attribute");
  if (length_char_column) {
    add(*length_char_column, "character count");
    if (std::find(attribute_columns.begin(), attribute_columns.end(),
                  length_attribute) != attribute_columns.end()) {
      throw ValidationError(fmt::format(
          "schema: '{}' is both derived and read as a column",
          length_attribute));
    }
  }
}

InputFormat FormatFromPath(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  return ext == ".jsonl" || ext == ".ndjson" ? InputFormat::kJsonl
                                             : InputFormat::kCsv;
}

std::optional<InputFormat> ParseInputFormat(std::string_view name) {
  if (name == "csv") return InputFormat::kCsv;
  if (name == "jsonl") return InputFormat::kJsonl;
  return std::nullopt;
}

std::vector<Record> ParseRecords(std::istream& input, InputFormat format,
                                 const Schema& schema) {
  schema.Validate();
  return format == InputFormat::kCsv ? ParseCsv(input, schema)
                                     : ParseJsonl(input, schema);
}

std::vector<Record> ReadRecordsFile(const std::filesystem::path& path,
                                    const Schema& schema,
                                    std::optional<InputFormat> format) {
  std::ifstream input(path, std::ios::binary);
  if (!input) {
    throw ValidationError(
        fmt::format("cannot open input file '{}'", path.string()));
  }
  try {
    return ParseRecords(input, format.value_or(FormatFromPath(path)), schema);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void WriteRecords(std::ostream& output, std::span<const Record> records,
                  InputFormat format, std::span<const std::string> attributes,
                  const Schema& schema) {
  const bool with_id = std::any_of(records.begin(), records.end(),
                                   [](const Record& r) { return r.id; });
  if (format == InputFormat::kCsv) {
    std::vector<std::string> header;
    if (with_id) header.push_back(schema.id_column);
    header.push_back(schema.score_column);
    header.push_back(schema.label_column);
    header.insert(header.end(), attributes.begin(), attributes.end());
    output << internal::JoinCsvLine(header) << '\n';
    std::vector<std::string> fields;
    for (const Record& record : records) {
      fields.clear();
      if (with_id) fields.push_back(record.id.value_or(""));
      fields.push_back(FormatScore(record.score));
      fields.push_back(std::to_string(record.label));
      for (const auto& name : attributes) {
        const auto it = record.attributes.find(name);
        fields.push_back(it == record.attributes.end() ? "" : it->second);
      }
      output << internal::JoinCsvLine(fields) << '\n';
    }
    return;
  }
  for (const Record& record : records) {
    std::string line = "{";
    if (with_id && record.id) {
      line += fmt::format("{}: {}, ", json(schema.id_column).dump(),
                          json(*record.id).dump());
    }
    line += fmt::format("{}: {}, {}: {}", json(schema.score_column).dump(),
                        FormatScore(record.score),
                        json(schema.label_column).dump(), record.label);
    for (const auto& name : attributes) {
      const auto it = record.attributes.find(name);
      line += fmt::format(
          ", {}: {}", json(name).dump(),
          json(it == record.attributes.end() ? "" : it->second).dump());
    }
    output << line << "}\n";
  }
}

std::string_view DeriveLengthCategory(std::int64_t char_count) {
  if (char_count < 0) {
    throw ValidationError(
        fmt::format("negative character count {}", char_count));
  }
  if (char_count <= 1000) return "short";
  if (char_count <= 2500) return "medium";
  return "long";
}

GroupKey::GroupKey(std::vector<Part> parts) : parts_(std::move(parts)) {
  std::sort(parts_.begin(), parts_.end());
  for (std::size_t i = 1; i < parts_.size(); ++i) {
    if (parts_[i].first == parts_[i - 1].first) {
      throw ValidationError(fmt::format(
          "group key names attribute '{}' twice", parts_[i].first));
    }
  }
}

GroupKey GroupKey::FromRecord(const Record& record,
                              std::span<const std::string> attribute_names,
                              std::size_t row) {
  std::vector<Part> parts;
  parts.reserve(attribute_names.size());
  for (const auto& name : attribute_names) {
    const auto it = record.attributes.find(name);
    if (it == record.attributes.end() || it->second.empty()) {
      throw ValidationError(fmt::format("record {} is missing attribute '{}'",
                                        record.Describe(row), name));
    }
    parts.emplace_back(name, it->second);
  }
  return GroupKey(std::move(parts));
}

std::string GroupKey::ToString() const {
  std::string out;
  for (const auto& [attribute, category] : parts_) {
    if (!out.empty()) out += '_';
    out += category;
  }
  return out;
}

GroupedDataset GroupedDataset::Partition(
    std::vector<Record> records, std::vector<std::string> attribute_names) {
  std::sort(attribute_names.begin(), attribute_names.end());
  if (std::adjacent_find(attribute_names.begin(), attribute_names.end()) !=
      attribute_names.end()) {
    throw ValidationError("partition: attribute listed twice");
  }
  GroupedDataset out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.groups_[GroupKey::FromRecord(records[i], attribute_names, i + 1)]
        .push_back(i);
  }
  out.records_ = std::move(records);
  out.attribute_names_ = std::move(attribute_names);
  return out;
}

LabeledScores GroupedDataset::Gather(const GroupKey& key) const {
  LabeledScores out;
  const auto it = groups_.find(key);
  if (it == groups_.end()) return out;
  out.scores.reserve(it->second.size());
  out.labels.reserve(it->second.size());
  for (const std::size_t index : it->second) {
    out.scores.push_back(records_[index].score);
    out.labels.push_back(records_[index].label);
  }
  return out;
}

double RoundTo7(double value) { return std::round(value * 1e7) / 1e7; }

}  // namespace fairthresh
