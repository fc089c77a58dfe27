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

#include "kapr/state_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace kapr {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

Error bad_line(std::size_t line, const std::string& message) {
  return Error(ErrorCode::kIngestion, "state file line " + std::to_string(line) + ": " + message);
}

std::int64_t parse_int(std::string_view s, std::size_t line, const char* what) {
  s = trim(s);
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw bad_line(line, std::string("expected an integer ") + what + ", got '" +
                             std::string(s) + "'");
  }
  return v;
}

std::size_t parse_row(std::string_view s, std::size_t line) {
  const auto v = parse_int(s, line, "row");
  if (v < 1) throw bad_line(line, "rows are numbered from 1");
  return static_cast<std::size_t>(v - 1);
}

}  // namespace

StateFile parse_state_file(std::string_view text) {
  StateFile out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (int i = 0; i < 2; ++i) {
      const auto comma = line.find(',', start);
      if (comma == std::string_view::npos) break;
      fields.push_back(trim(line.substr(start, comma - start)));
      start = comma + 1;
    }
    fields.push_back(trim(line.substr(start)));
    if (fields.size() != 3) throw bad_line(line_no, "expected three comma-separated fields");

    if (fields[0] == "k") {
      const auto row = parse_row(fields[1], line_no);
      const auto k = parse_int(fields[2], line_no, "anonymity set size");
      if (k < 1) throw bad_line(line_no, "anonymity set size must be at least 1");
      out.pinned_k[row] = k;
      continue;
    }
    StateEntry e;
    e.line = line_no;
    e.row = parse_row(fields[0], line_no);
    e.attribute = std::string(fields[1]);
    if (e.attribute.empty()) throw bad_line(line_no, "missing attribute name");
    if (fields[2] != "*") {
      std::vector<std::size_t> offsets;
      std::istringstream in{std::string(fields[2])};
      std::string tok;
      while (in >> tok) {
        const auto v = parse_int(tok, line_no, "offset");
        if (v < 0) throw bad_line(line_no, "offsets are non-negative");
        offsets.push_back(static_cast<std::size_t>(v));
      }
      if (offsets.empty()) throw bad_line(line_no, "no offsets given");
      e.offsets = std::move(offsets);
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

StateFile load_state_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open state file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_state_file(ss.str());
}

DisclosureState build_state(std::shared_ptr<const PartialDisplay> display, const StateFile& file) {
  DisclosureState state(display);
  for (const auto& e : file.entries) {
    if (e.row >= display->rows()) {
      throw bad_line(e.line, "row " + std::to_string(e.row + 1) + " is outside the display (" +
                                 std::to_string(display->rows()) + " rows)");
    }
    const auto attr = display->find_attribute(e.attribute);
    if (!attr) throw bad_line(e.line, "unknown attribute '" + e.attribute + "'");
    const CellRef cell{e.row, *attr};
    try {
      if (e.offsets) {
        state = state.with_revealed(cell, *e.offsets, DisplayMode::kPartial);
      } else {
        const auto all = data_positions(display->value(e.row, *attr), display->attribute(*attr));
        state = state.with_revealed(cell, all, DisplayMode::kFull);
      }
    } catch (const Error& err) {
      throw bad_line(e.line, err.what());
    }
  }
  for (const auto& [row, k] : file.pinned_k) {
    if (row >= display->rows()) {
      throw Error(ErrorCode::kIngestion,
                  "pinned row " + std::to_string(row + 1) + " is outside the display");
    }
  }
  return state;
}

DisclosureMatrix pinned_matrix(const DisclosureState& state, const StateFile& file) {
  auto m = state.matrix();
  for (const auto& [row, k] : file.pinned_k) m.k.at(row) = k;
  return m;
}

}  // namespace kapr
