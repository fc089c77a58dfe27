//
// Copyright 2026 The kaprlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace kapr {

enum class AttributeKind { kFixedString, kVarString, kDate, kCategory };
enum class AttributeRole { kIdentifier, kQuasiIdentifier, kSensitive };

std::string_view to_string(AttributeKind kind);
std::string_view to_string(AttributeRole role);
AttributeKind parse_attribute_kind(std::string_view text);
AttributeRole parse_attribute_role(std::string_view text);

// Fixed textual layout of a date attribute, e.g. "MM/DD/YYYY". Letters mark
// data positions (runs of the same letter form one element); every other
// character is a literal separator that carries no disclosure weight.
class DateLayout {
 public:
  struct Element {
    char tag;
    std::size_t begin;
    std::size_t length;
    friend bool operator==(const Element&, const Element&) = default;
  };

  DateLayout() : DateLayout("MM/DD/YYYY") {}
  explicit DateLayout(std::string_view layout);

  const std::string& text() const { return text_; }
  std::size_t size() const { return text_.size(); }
  bool is_separator(std::size_t pos) const;
  const std::vector<Element>& elements() const { return elements_; }
  // Index into elements() for a data position; -1 for separators.
  int element_at(std::size_t pos) const;
  std::size_t data_chars() const;
  bool matches(std::string_view value) const;

  friend bool operator==(const DateLayout&, const DateLayout&) = default;

 private:
  std::string text_;
  std::vector<Element> elements_;
  std::vector<int> element_of_;
};

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::kVarString;
  AttributeRole role = AttributeRole::kIdentifier;
  DateLayout layout;

  bool sensitive() const { return role == AttributeRole::kSensitive; }
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

class Schema {
 public:
  Schema() = default;
  Schema(std::vector<Attribute> attributes, std::string label_column = {});

  // Accepts either {"attributes": [{name, kind, role, layout?}, ...],
  // "label_column": "ID"} or an object mapping column name to
  // {kind, role, layout?} (attribute order then follows the object's keys).
  static Schema from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  const std::vector<Attribute>& attributes() const { return attributes_; }
  const Attribute& attribute(std::size_t j) const { return attributes_.at(j); }
  std::size_t size() const { return attributes_.size(); }
  std::optional<std::size_t> find(std::string_view name) const;
  const std::string& label_column() const { return label_column_; }

  // Indices of identifier and quasi-identifier attributes, in schema order.
  std::vector<std::size_t> non_sensitive() const;
  std::vector<std::size_t> sensitive() const;
  Schema restricted_to(const std::vector<std::size_t>& columns) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Attribute> attributes_;
  std::string label_column_;
};

// nullopt is the missing-marker.
using Value = std::optional<std::string>;

struct SourceRecord {
  int label = 0;          // 1-based ingestion row order
  std::string source_id;  // content of the label column, if the schema has one
  std::vector<Value> values;

  friend bool operator==(const SourceRecord&, const SourceRecord&) = default;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(Schema schema, std::vector<SourceRecord> records);

  const Schema& schema() const { return schema_; }
  const std::vector<SourceRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  // Number of non-sensitive attributes.
  std::size_t attribute_count() const { return schema_.non_sensitive().size(); }
  const SourceRecord& by_label(int label) const;
  const Value& value(int label, std::size_t attribute) const {
    return by_label(label).values.at(attribute);
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Schema schema_;
  std::vector<SourceRecord> records_;
};

Dataset load_dataset(std::string_view csv, const Schema& schema);
Dataset load_dataset_file(const std::string& csv_path, const Schema& schema);
Schema load_schema_file(const std::string& path);

using Pseudonym = std::string;

struct PseudonymizedSplit {
  struct Row {
    Pseudonym pseudonym;
    std::vector<Value> values;
    friend bool operator==(const Row&, const Row&) = default;
  };

  Schema schema;                      // full schema of the source dataset
  std::vector<Row> identity_table;    // non-sensitive columns, shuffled
  std::vector<Row> sensitive_table;   // sensitive columns, sorted by pseudonym
  std::map<int, Pseudonym> pseudonym_map;  // server-side only
  std::map<int, std::string> source_ids;

  // Non-sensitive view of the source dataset, ordered by record label. This is
  // the only table display, anonymity and pairing code ever sees.
  Dataset identity_dataset() const;
  // Rebuilds the source dataset by joining both tables on the pseudonym.
  Dataset join() const;

  nlohmann::json to_json() const;
  static PseudonymizedSplit from_json(const nlohmann::json& doc);
};

PseudonymizedSplit pseudonymize(const Dataset& dataset, std::mt19937_64& rng);

std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);

}  // namespace kapr
