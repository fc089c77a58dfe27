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

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kapr/dataset.hpp"
#include "kapr/rational.hpp"

namespace kapr {

enum class DisplayMode { kMasked = 0, kPartial = 1, kFull = 2 };

std::string_view to_string(DisplayMode mode);
DisplayMode parse_display_mode(std::string_view text);

// How date discrepancies are disclosed: only the differing digits inside
// aligned elements, or whole discrepant elements.
enum class DateGranularity { kCharacter, kElement };

std::string_view to_string(DateGranularity g);
DateGranularity parse_date_granularity(std::string_view text);

enum class Side { kA = 0, kB = 1 };

inline std::size_t index(Side s) { return static_cast<std::size_t>(s); }
inline Side other(Side s) { return s == Side::kA ? Side::kB : Side::kA; }

// Unit classes are named from the point of view of editing side a into side
// b: kDelete units exist only on side a, kInsert units only on side b.
enum class UnitClass {
  kDiffer,
  kInsert,
  kDelete,
  kElementSwap,
  kCharTransposition,
  kMissing,
};

std::string_view to_string(UnitClass c);

enum class TokenKind { kIdentical, kDiscrepant, kSeparator, kMissing };

struct Token {
  TokenKind kind = TokenKind::kIdentical;
  std::size_t begin = 0;  // byte offset into this side's value
  std::string text;
  int unit = -1;        // index into the owning unit list (discrepant/missing)
  int content_id = -1;  // equal text <=> equal id (discrepant only)
};

struct DiscrepancyUnit {
  UnitClass cls = UnitClass::kDiffer;
  std::array<std::string, 2> text;
  std::array<std::size_t, 2> begin{};
  std::array<int, 2> content_id{-1, -1};
};

// One granularity of a pair's discrepancy structure.
struct AlignmentView {
  std::vector<DiscrepancyUnit> units;
  std::array<std::vector<Token>, 2> sides;
  int content_ids = 0;
};

class PairAlignment {
 public:
  AttributeKind kind() const { return kind_; }
  const Value& value(Side s) const { return values_[index(s)]; }
  const DateLayout& layout() const { return layout_; }

  // Character-level structure. For dates the element-level view (whole
  // discrepant elements as units) is available separately.
  const AlignmentView& view(DateGranularity g = DateGranularity::kCharacter) const {
    return (kind_ == AttributeKind::kDate && g == DateGranularity::kElement) ? element_view_
                                                                             : view_;
  }
  const std::vector<Token>& tokens(Side s, DateGranularity g = DateGranularity::kCharacter) const {
    return view(g).sides[index(s)];
  }
  const std::vector<DiscrepancyUnit>& units(DateGranularity g = DateGranularity::kCharacter) const {
    return view(g).units;
  }
  bool identical() const { return view_.units.empty(); }

 private:
  friend PairAlignment align_pair(const Value&, const Value&, const Attribute&);

  AttributeKind kind_ = AttributeKind::kVarString;
  DateLayout layout_;
  std::array<Value, 2> values_;
  AlignmentView view_;
  AlignmentView element_view_;
};

PairAlignment align_pair(const Value& a, const Value& b, const Attribute& attribute);

enum class MarkupKind { kIdentical, kDiscrepant, kSeparator, kMissing };

std::string_view to_string(MarkupKind k);

struct MarkupEntry {
  MarkupKind kind = MarkupKind::kIdentical;
  int token_id = -1;  // content id for discrepant characters
  bool shown = false;  // the true character is visible

  friend bool operator==(const MarkupEntry&, const MarkupEntry&) = default;
};

struct DisplayCell {
  std::string rendered;
  DisplayMode mode = DisplayMode::kMasked;
  std::size_t n_chars = 0;          // data characters, separators excluded
  std::size_t disclosed_chars = 0;  // true characters visible
  bool not_applicable = false;      // partial requested on a category cell
  std::vector<MarkupEntry> markup;  // parallel to `rendered`
  std::vector<std::size_t> revealed_positions;  // offsets into the true value

  friend bool operator==(const DisplayCell&, const DisplayCell&) = default;
};

char markup_symbol(int content_id);

DisplayCell render(const PairAlignment& alignment, DisplayMode mode, Side side,
                   DateGranularity granularity = DateGranularity::kCharacter);

// Renders a cell from an explicit set of revealed offsets (used when the
// revealed set does not correspond to a single mode, e.g. state files).
DisplayCell render_revealed(const PairAlignment& alignment, Side side,
                            const std::vector<std::size_t>& revealed, DisplayMode mode,
                            DateGranularity granularity = DateGranularity::kCharacter);

// Number of data characters of a value: separators of a date layout are not
// counted; missing values have none.
std::size_t data_char_count(const Value& value, const Attribute& attribute);
// Offsets of the data characters of a value.
std::vector<std::size_t> data_positions(const Value& value, const Attribute& attribute);

// Offsets a reveal to `mode` exposes on `side`.
std::vector<std::size_t> positions_for_mode(const PairAlignment& alignment, Side side,
                                            DisplayMode mode, DateGranularity granularity);

// d_ij / n_ij; 0 when the value has no characters.
Rational proportion_disclosed(const DisplayCell& cell);

}  // namespace kapr
