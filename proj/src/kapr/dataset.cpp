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

#include "kapr/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "kapr/error.hpp"

namespace kapr {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string to_hex(std::uint64_t hi, std::uint64_t lo) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 0; i < 16; ++i) {
    out[15 - i] = kDigits[hi & 0xf];
    out[31 - i] = kDigits[lo & 0xf];
    hi >>= 4;
    lo >>= 4;
  }
  return out;
}

nlohmann::json value_to_json(const Value& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

Value value_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

}  // namespace

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kFixedString: return "fixed-string";
    case AttributeKind::kVarString: return "var-string";
    case AttributeKind::kDate: return "date";
    case AttributeKind::kCategory: return "category";
  }
  return "?";
}

std::string_view to_string(AttributeRole role) {
  switch (role) {
    case AttributeRole::kIdentifier: return "identifier";
    case AttributeRole::kQuasiIdentifier: return "quasi-identifier";
    case AttributeRole::kSensitive: return "sensitive";
  }
  return "?";
}

AttributeKind parse_attribute_kind(std::string_view text) {
  if (text == "fixed-string" || text == "string") return AttributeKind::kFixedString;
  if (text == "var-string" || text == "varchar") return AttributeKind::kVarString;
  if (text == "date") return AttributeKind::kDate;
  if (text == "category" || text == "categorical") return AttributeKind::kCategory;
  throw Error(ErrorCode::kInvalidArgument, "unknown attribute kind '" + std::string(text) + "'");
}

AttributeRole parse_attribute_role(std::string_view text) {
  if (text == "identifier") return AttributeRole::kIdentifier;
  if (text == "quasi-identifier" || text == "quasi") return AttributeRole::kQuasiIdentifier;
  if (text == "sensitive") return AttributeRole::kSensitive;
  throw Error(ErrorCode::kInvalidArgument, "unknown attribute role '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// DateLayout

DateLayout::DateLayout(std::string_view layout) : text_(layout) {
  if (text_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty date layout");
  element_of_.assign(text_.size(), -1);
  for (std::size_t i = 0; i < text_.size();) {
    if (!std::isalpha(static_cast<unsigned char>(text_[i]))) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text_.size() && text_[end] == text_[i]) ++end;
    for (std::size_t p = i; p < end; ++p) element_of_[p] = static_cast<int>(elements_.size());
    elements_.push_back({text_[i], i, end - i});
    i = end;
  }
  if (elements_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "date layout '" + text_ + "' has no elements");
  }
}

bool DateLayout::is_separator(std::size_t pos) const { return element_of_.at(pos) < 0; }

int DateLayout::element_at(std::size_t pos) const { return element_of_.at(pos); }

std::size_t DateLayout::data_chars() const {
  std::size_t n = 0;
  for (const auto& e : elements_) n += e.length;
  return n;
}

bool DateLayout::matches(std::string_view value) const {
  if (value.size() != text_.size()) return false;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (is_separator(i)) {
      if (value[i] != text_[i]) return false;
    } else if (!std::isdigit(static_cast<unsigned char>(value[i]))) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Schema

Schema::Schema(std::vector<Attribute> attributes, std::string label_column)
    : attributes_(std::move(attributes)), label_column_(std::move(label_column)) {
  std::set<std::string> seen;
  for (const auto& a : attributes_) {
    if (a.name.empty()) throw Error(ErrorCode::kInvalidArgument, "attribute with empty name");
    if (!seen.insert(a.name).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate attribute '" + a.name + "'");
    }
  }
  if (!label_column_.empty() && seen.count(label_column_)) {
    throw Error(ErrorCode::kInvalidArgument,
                "label column '" + label_column_ + "' is also declared as an attribute");
  }
  if (non_sensitive().empty()) {
    throw Error(ErrorCode::kInvalidArgument, "schema needs at least one non-sensitive attribute");
  }
}

Schema Schema::from_json(const nlohmann::json& doc) {
  auto parse_one = [](const std::string& name, const nlohmann::json& spec) {
    Attribute a;
    a.name = name;
    a.kind = parse_attribute_kind(spec.at("kind").get<std::string>());
    a.role = parse_attribute_role(spec.at("role").get<std::string>());
    if (spec.contains("layout")) {
      if (a.kind != AttributeKind::kDate) {
        throw Error(ErrorCode::kInvalidArgument, "layout given for non-date attribute '" + name + "'");
      }
      a.layout = DateLayout(spec.at("layout").get<std::string>());
    }
    return a;
  };
  try {
    std::vector<Attribute> attrs;
    std::string label;
    if (doc.contains("attributes")) {
      for (const auto& spec : doc.at("attributes")) {
        attrs.push_back(parse_one(spec.at("name").get<std::string>(), spec));
      }
      label = doc.value("label_column", std::string{});
    } else {
      // nlohmann::json sorts object keys; ordered_json keeps file order.
      for (const auto& [name, spec] : doc.items()) {
        if (name == "label_column") {
          label = spec.get<std::string>();
          continue;
        }
        attrs.push_back(parse_one(name, spec));
      }
    }
    return Schema(std::move(attrs), std::move(label));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed schema: ") + e.what());
  }
}

nlohmann::json Schema::to_json() const {
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& a : attributes_) {
    nlohmann::json spec = {{"name", a.name},
                           {"kind", std::string(to_string(a.kind))},
                           {"role", std::string(to_string(a.role))}};
    if (a.kind == AttributeKind::kDate) spec["layout"] = a.layout.text();
    attrs.push_back(std::move(spec));
  }
  nlohmann::json doc = {{"attributes", std::move(attrs)}};
  if (!label_column_.empty()) doc["label_column"] = label_column_;
  return doc;
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t j = 0; j < attributes_.size(); ++j) {
    if (attributes_[j].name == name) return j;
  }
  return std::nullopt;
}

std::vector<std::size_t> Schema::non_sensitive() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < attributes_.size(); ++j) {
    if (!attributes_[j].sensitive()) out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> Schema::sensitive() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < attributes_.size(); ++j) {
    if (attributes_[j].sensitive()) out.push_back(j);
  }
  return out;
}

Schema Schema::restricted_to(const std::vector<std::size_t>& columns) const {
  Schema out;
  out.label_column_ = label_column_;
  for (std::size_t j : columns) out.attributes_.push_back(attributes_.at(j));
  return out;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Schema schema, std::vector<SourceRecord> records)
    : schema_(std::move(schema)), records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].label != static_cast<int>(i) + 1) {
      throw Error(ErrorCode::kInternal, "record labels must be dense and 1-based");
    }
    if (records_[i].values.size() != schema_.size()) {
      throw Error(ErrorCode::kInternal, "record width does not match schema");
    }
  }
}

const SourceRecord& Dataset::by_label(int label) const {
  if (label < 1 || static_cast<std::size_t>(label) > records_.size()) {
    throw Error(ErrorCode::kNotFound, "no record " + std::to_string(label));
  }
  return records_[static_cast<std::size_t>(label) - 1];
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default:
        field += c;
        any = true;
    }
  }
  if (quoted) throw IngestionError("unterminated quoted field", static_cast<int>(rows.size()));
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Dataset load_dataset(std::string_view csv, const Schema& schema) {
  // Strip a UTF-8 byte order mark.
  if (csv.substr(0, 3) == "\xEF\xBB\xBF") csv.remove_prefix(3);
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw IngestionError("empty dataset: missing header");

  const auto& header = rows.front();
  std::vector<int> column_of(schema.size(), -1);
  int label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(trim(header[c]));
    if (!schema.label_column().empty() && name == schema.label_column()) {
      label_col = static_cast<int>(c);
      continue;
    }
    auto j = schema.find(name);
    if (!j) throw IngestionError("header column not in schema", 0, name);
    if (column_of[*j] >= 0) throw IngestionError("duplicate header column", 0, name);
    column_of[*j] = static_cast<int>(c);
  }
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (column_of[j] < 0) {
      throw IngestionError("schema attribute missing from header", 0, schema.attribute(j).name);
    }
  }
  if (!schema.label_column().empty() && label_col < 0) {
    throw IngestionError("label column missing from header", 0, schema.label_column());
  }
  if (rows.size() == 1) throw IngestionError("empty dataset");

  std::vector<SourceRecord> records;
  std::unordered_set<std::string> seen_ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int row_no = static_cast<int>(r);
    const auto& fields = rows[r];
    if (fields.size() != header.size()) {
      throw IngestionError("expected " + std::to_string(header.size()) + " fields, found " +
                               std::to_string(fields.size()),
                           row_no);
    }
    SourceRecord rec;
    rec.label = row_no;
    if (label_col >= 0) {
      rec.source_id = std::string(trim(fields[static_cast<std::size_t>(label_col)]));
      if (rec.source_id.empty()) {
        throw IngestionError("empty record index", row_no, schema.label_column());
      }
      if (!seen_ids.insert(rec.source_id).second) {
        throw IngestionError("duplicate record index '" + rec.source_id + "'", row_no,
                             schema.label_column());
      }
    }
    rec.values.reserve(schema.size());
    for (std::size_t j = 0; j < schema.size(); ++j) {
      const auto& attr = schema.attribute(j);
      const auto text = trim(fields[static_cast<std::size_t>(column_of[j])]);
      if (text.empty()) {
        rec.values.emplace_back(std::nullopt);
        continue;
      }
      if (attr.kind == AttributeKind::kDate && !attr.layout.matches(text)) {
        throw IngestionError("malformed date '" + std::string(text) + "' for layout " +
                                 attr.layout.text(),
                             row_no, attr.name);
      }
      rec.values.emplace_back(std::string(text));
    }
    records.push_back(std::move(rec));
  }
  return Dataset(schema, std::move(records));
}

Dataset load_dataset_file(const std::string& csv_path, const Schema& schema) {
  return load_dataset(read_file(csv_path), schema);
}

Schema load_schema_file(const std::string& path) {
  const auto text = read_file(path);
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "schema " + path + ": " + e.what());
  }
  // Round-trip through the ordered form so mapping-style schemas keep the
  // column order of the file.
  if (!doc.contains("attributes")) {
    nlohmann::json list = nlohmann::json::array();
    std::string label;
    for (const auto& [name, spec] : doc.items()) {
      if (name == "label_column") {
        label = spec.get<std::string>();
        continue;
      }
      nlohmann::json entry = nlohmann::json::parse(spec.dump());
      entry["name"] = name;
      list.push_back(std::move(entry));
    }
    nlohmann::json normalized = {{"attributes", std::move(list)}};
    if (!label.empty()) normalized["label_column"] = label;
    return Schema::from_json(normalized);
  }
  return Schema::from_json(nlohmann::json::parse(doc.dump()));
}

// ---------------------------------------------------------------------------
// Pseudonymization

PseudonymizedSplit pseudonymize(const Dataset& dataset, std::mt19937_64& rng) {
  PseudonymizedSplit split;
  split.schema = dataset.schema();
  const auto identity_cols = dataset.schema().non_sensitive();
  const auto sensitive_cols = dataset.schema().sensitive();

  std::unordered_set<std::string> issued;
  for (const auto& rec : dataset.records()) {
    Pseudonym p;
    do {
      const std::uint64_t hi = rng();
      const std::uint64_t lo = rng();
      p = to_hex(hi, lo);
    } while (!issued.insert(p).second);
    split.pseudonym_map.emplace(rec.label, p);
    if (!rec.source_id.empty()) split.source_ids.emplace(rec.label, rec.source_id);

    PseudonymizedSplit::Row id_row{p, {}};
    for (auto j : identity_cols) id_row.values.push_back(rec.values[j]);
    split.identity_table.push_back(std::move(id_row));

    PseudonymizedSplit::Row s_row{p, {}};
    for (auto j : sensitive_cols) s_row.values.push_back(rec.values[j]);
    split.sensitive_table.push_back(std::move(s_row));
  }
  std::shuffle(split.identity_table.begin(), split.identity_table.end(), rng);
  std::sort(split.sensitive_table.begin(), split.sensitive_table.end(),
            [](const auto& a, const auto& b) { return a.pseudonym < b.pseudonym; });
  return split;
}

Dataset PseudonymizedSplit::identity_dataset() const {
  const auto cols = schema.non_sensitive();
  std::unordered_map<std::string, const Row*> by_pseudonym;
  for (const auto& row : identity_table) by_pseudonym.emplace(row.pseudonym, &row);
  std::vector<SourceRecord> records;
  for (const auto& [label, p] : pseudonym_map) {
    SourceRecord rec;
    rec.label = label;
    if (auto it = source_ids.find(label); it != source_ids.end()) rec.source_id = it->second;
    rec.values = by_pseudonym.at(p)->values;
    records.push_back(std::move(rec));
  }
  return Dataset(schema.restricted_to(cols), std::move(records));
}

Dataset PseudonymizedSplit::join() const {
  const auto identity_cols = schema.non_sensitive();
  const auto sensitive_cols = schema.sensitive();
  std::unordered_map<std::string, const Row*> ids;
  std::unordered_map<std::string, const Row*> sens;
  for (const auto& row : identity_table) ids.emplace(row.pseudonym, &row);
  for (const auto& row : sensitive_table) sens.emplace(row.pseudonym, &row);
  std::vector<SourceRecord> records;
  for (const auto& [label, p] : pseudonym_map) {
    SourceRecord rec;
    rec.label = label;
    if (auto it = source_ids.find(label); it != source_ids.end()) rec.source_id = it->second;
    rec.values.resize(schema.size());
    const Row* id_row = ids.at(p);
    const Row* s_row = sens.at(p);
    for (std::size_t c = 0; c < identity_cols.size(); ++c) rec.values[identity_cols[c]] = id_row->values[c];
    for (std::size_t c = 0; c < sensitive_cols.size(); ++c) rec.values[sensitive_cols[c]] = s_row->values[c];
    records.push_back(std::move(rec));
  }
  return Dataset(schema, std::move(records));
}

nlohmann::json PseudonymizedSplit::to_json() const {
  auto rows_json = [](const std::vector<Row>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json values = nlohmann::json::array();
      for (const auto& v : row.values) values.push_back(value_to_json(v));
      out.push_back({{"pseudonym", row.pseudonym}, {"values", std::move(values)}});
    }
    return out;
  };
  nlohmann::json map = nlohmann::json::object();
  for (const auto& [label, p] : pseudonym_map) map[std::to_string(label)] = p;
  nlohmann::json sources = nlohmann::json::object();
  for (const auto& [label, id] : source_ids) sources[std::to_string(label)] = id;
  return {{"schema", schema.to_json()},
          {"identity_table", rows_json(identity_table)},
          {"sensitive_table", rows_json(sensitive_table)},
          {"pseudonym_map", std::move(map)},
          {"source_ids", std::move(sources)}};
}

PseudonymizedSplit PseudonymizedSplit::from_json(const nlohmann::json& doc) {
  auto rows_from = [](const nlohmann::json& arr) {
    std::vector<Row> rows;
    for (const auto& r : arr) {
      Row row{r.at("pseudonym").get<std::string>(), {}};
      for (const auto& v : r.at("values")) row.values.push_back(value_from_json(v));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  PseudonymizedSplit split;
  split.schema = Schema::from_json(doc.at("schema"));
  split.identity_table = rows_from(doc.at("identity_table"));
  split.sensitive_table = rows_from(doc.at("sensitive_table"));
  for (const auto& [label, p] : doc.at("pseudonym_map").items()) {
    split.pseudonym_map.emplace(std::stoi(label), p.get<std::string>());
  }
  const auto sources = doc.value("source_ids", nlohmann::json::object());
  for (const auto& [label, id] : sources.items()) {
    split.source_ids.emplace(std::stoi(label), id.get<std::string>());
  }
  return split;
}

}  // namespace kapr
