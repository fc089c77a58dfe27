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

#include "kapr/masking.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "kapr/edit_script.hpp"
#include "kapr/error.hpp"

namespace kapr {
namespace {

constexpr char kMaskChar = '*';
constexpr char kMissingChar = '?';
constexpr char kSymbols[] = {'@', '&', '#', '%'};

// Appends identical text as one token, merging with a preceding identical run.
void push_identical(std::vector<Token>& side, std::size_t begin, std::string_view text) {
  if (text.empty()) return;
  if (!side.empty() && side.back().kind == TokenKind::kIdentical &&
      side.back().begin + side.back().text.size() == begin) {
    side.back().text += text;
    return;
  }
  side.push_back({TokenKind::kIdentical, begin, std::string(text), -1, -1});
}

void push_unit(AlignmentView& view, DiscrepancyUnit unit) {
  const int id = static_cast<int>(view.units.size());
  for (std::size_t s = 0; s < 2; ++s) {
    if (unit.text[s].empty()) continue;
    view.sides[s].push_back({TokenKind::kDiscrepant, unit.begin[s], unit.text[s], id, -1});
  }
  view.units.push_back(std::move(unit));
}

// Content ids in discovery order: side a left to right, then side b.
void assign_content_ids(AlignmentView& view) {
  std::map<std::string, int> ids;
  for (auto& side : view.sides) {
    for (auto& tok : side) {
      if (tok.kind != TokenKind::kDiscrepant) continue;
      auto [it, inserted] = ids.emplace(tok.text, static_cast<int>(ids.size()));
      tok.content_id = it->second;
    }
  }
  for (std::size_t s = 0; s < 2; ++s) {
    for (const auto& tok : view.sides[s]) {
      if (tok.kind == TokenKind::kDiscrepant) view.units[tok.unit].content_id[s] = tok.content_id;
    }
  }
  view.content_ids = static_cast<int>(ids.size());
}

UnitClass classify(const std::vector<EditStep>& steps) {
  bool all_del = true, all_ins = true, all_tr = true;
  for (const auto& st : steps) {
    all_del &= st.op == EditOp::kDelete;
    all_ins &= st.op == EditOp::kInsert;
    all_tr &= st.op == EditOp::kTranspose;
  }
  if (all_del) return UnitClass::kDelete;
  if (all_ins) return UnitClass::kInsert;
  if (all_tr) return UnitClass::kCharTransposition;
  return UnitClass::kDiffer;
}

void align_by_script(AlignmentView& view, std::string_view a, std::string_view b,
                     const std::vector<EditStep>& script) {
  std::vector<EditStep> pending;
  auto flush = [&] {
    if (pending.empty()) return;
    DiscrepancyUnit unit;
    unit.cls = classify(pending);
    unit.begin = {pending.front().a_pos, pending.front().b_pos};
    for (const auto& st : pending) {
      unit.text[0] += a.substr(st.a_pos, st.a_len());
      unit.text[1] += b.substr(st.b_pos, st.b_len());
    }
    push_unit(view, std::move(unit));
    pending.clear();
  };
  for (const auto& st : script) {
    if (st.op == EditOp::kMatch) {
      flush();
      push_identical(view.sides[0], st.a_pos, a.substr(st.a_pos, 1));
      push_identical(view.sides[1], st.b_pos, b.substr(st.b_pos, 1));
    } else {
      pending.push_back(st);
    }
  }
  flush();
}

void align_positional(AlignmentView& view, std::string_view a, std::string_view b) {
  std::size_t i = 0;
  while (i < a.size()) {
    if (a[i] == b[i]) {
      push_identical(view.sides[0], i, a.substr(i, 1));
      push_identical(view.sides[1], i, b.substr(i, 1));
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < a.size() && a[end] != b[end]) ++end;
    push_unit(view, {UnitClass::kDiffer,
                     {std::string(a.substr(i, end - i)), std::string(b.substr(i, end - i))},
                     {i, i},
                     {-1, -1}});
    i = end;
  }
}

std::size_t hamming(std::string_view a, std::string_view b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

// Element e of `a` and element f of `b` hold each other's content.
std::vector<bool> swapped_elements(const DateLayout& layout, std::string_view a,
                                   std::string_view b) {
  const auto& els = layout.elements();
  std::vector<bool> swapped(els.size(), false);
  auto text = [&](std::string_view v, const DateLayout::Element& e) {
    return v.substr(e.begin, e.length);
  };
  for (std::size_t e = 0; e < els.size(); ++e) {
    for (std::size_t f = e + 1; f < els.size(); ++f) {
      if (els[e].length != els[f].length) continue;
      if (text(a, els[e]) == text(a, els[f])) continue;
      if (text(a, els[e]) == text(b, els[f]) && text(a, els[f]) == text(b, els[e])) {
        swapped[e] = swapped[f] = true;
      }
    }
  }
  return swapped;
}

void align_date(AlignmentView& chars, AlignmentView& elements,
                const DateLayout& layout, std::string_view a, std::string_view b) {
  const auto swapped = swapped_elements(layout, a, b);
  auto push_separator = [](AlignmentView& v, std::size_t pos, char c) {
    for (auto& side : v.sides) side.push_back({TokenKind::kSeparator, pos, std::string(1, c), -1, -1});
  };
  std::size_t pos = 0;
  for (std::size_t e = 0; e < layout.elements().size(); ++e) {
    const auto& el = layout.elements()[e];
    for (; pos < el.begin; ++pos) {
      push_separator(chars, pos, a[pos]);
      push_separator(elements, pos, a[pos]);
    }
    const auto ea = a.substr(el.begin, el.length);
    const auto eb = b.substr(el.begin, el.length);
    if (ea == eb) {
      push_identical(chars.sides[0], el.begin, ea);
      push_identical(chars.sides[1], el.begin, eb);
      push_identical(elements.sides[0], el.begin, ea);
      push_identical(elements.sides[1], el.begin, eb);
    } else {
      push_unit(elements, {swapped[e] ? UnitClass::kElementSwap : UnitClass::kDiffer,
                           {std::string(ea), std::string(eb)},
                           {el.begin, el.begin},
                           {-1, -1}});
      for (std::size_t i = 0; i < el.length;) {
        const std::size_t p = el.begin + i;
        if (a[p] == b[p]) {
          push_identical(chars.sides[0], p, a.substr(p, 1));
          push_identical(chars.sides[1], p, b.substr(p, 1));
          ++i;
          continue;
        }
        std::size_t end = i;
        while (end < el.length && a[el.begin + end] != b[el.begin + end]) ++end;
        const auto ra = a.substr(p, end - i);
        const auto rb = b.substr(p, end - i);
        UnitClass cls = UnitClass::kDiffer;
        if (swapped[e]) {
          cls = UnitClass::kElementSwap;
        } else if (ra.size() == 2 && ra[0] == rb[1] && ra[1] == rb[0]) {
          cls = UnitClass::kCharTransposition;
        }
        push_unit(chars, {cls, {std::string(ra), std::string(rb)}, {p, p}, {-1, -1}});
        i = end;
      }
    }
    pos = el.begin + el.length;
  }
  for (; pos < layout.size(); ++pos) {
    push_separator(chars, pos, a[pos]);
    push_separator(elements, pos, a[pos]);
  }
}

void align_missing(AlignmentView& view, const Value& a, const Value& b) {
  DiscrepancyUnit unit;
  unit.cls = UnitClass::kMissing;
  const int id = 0;
  const std::array<const Value*, 2> vals{&a, &b};
  for (std::size_t s = 0; s < 2; ++s) {
    if (*vals[s]) {
      unit.text[s] = **vals[s];
      view.sides[s].push_back({TokenKind::kDiscrepant, 0, unit.text[s], id, -1});
    } else {
      view.sides[s].push_back({TokenKind::kMissing, 0, std::string(), id, -1});
    }
  }
  view.units.push_back(std::move(unit));
}

bool is_data_position(const PairAlignment& al, std::size_t pos) {
  return al.kind() != AttributeKind::kDate || !al.layout().is_separator(pos);
}

}  // namespace

std::string_view to_string(DisplayMode mode) {
  switch (mode) {
    case DisplayMode::kMasked: return "masked";
    case DisplayMode::kPartial: return "partial";
    case DisplayMode::kFull: return "full";
  }
  return "?";
}

DisplayMode parse_display_mode(std::string_view text) {
  if (text == "masked") return DisplayMode::kMasked;
  if (text == "partial") return DisplayMode::kPartial;
  if (text == "full") return DisplayMode::kFull;
  throw Error(ErrorCode::kInvalidArgument, "unknown display mode '" + std::string(text) + "'");
}

std::string_view to_string(DateGranularity g) {
  return g == DateGranularity::kCharacter ? "character" : "element";
}

DateGranularity parse_date_granularity(std::string_view text) {
  if (text == "character") return DateGranularity::kCharacter;
  if (text == "element") return DateGranularity::kElement;
  throw Error(ErrorCode::kInvalidArgument, "unknown date granularity '" + std::string(text) + "'");
}

std::string_view to_string(UnitClass c) {
  switch (c) {
    case UnitClass::kDiffer: return "differ";
    case UnitClass::kInsert: return "insert";
    case UnitClass::kDelete: return "delete";
    case UnitClass::kElementSwap: return "element-swap";
    case UnitClass::kCharTransposition: return "char-transposition";
    case UnitClass::kMissing: return "missing";
  }
  return "?";
}

std::string_view to_string(MarkupKind k) {
  switch (k) {
    case MarkupKind::kIdentical: return "identical";
    case MarkupKind::kDiscrepant: return "discrepant";
    case MarkupKind::kSeparator: return "separator";
    case MarkupKind::kMissing: return "missing";
  }
  return "?";
}

char markup_symbol(int content_id) {
  return kSymbols[static_cast<std::size_t>(content_id) % std::size(kSymbols)];
}

PairAlignment align_pair(const Value& a, const Value& b, const Attribute& attribute) {
  PairAlignment al;
  al.kind_ = attribute.kind;
  al.layout_ = attribute.layout;
  al.values_ = {a, b};

  if (!a || !b) {
    align_missing(al.view_, a, b);
  } else {
    const std::string_view va = *a;
    const std::string_view vb = *b;
    switch (attribute.kind) {
      case AttributeKind::kCategory:
        if (va == vb) {
          push_identical(al.view_.sides[0], 0, va);
          push_identical(al.view_.sides[1], 0, vb);
        } else {
          push_unit(al.view_, {UnitClass::kDiffer, {*a, *b}, {0, 0}, {-1, -1}});
        }
        break;
      case AttributeKind::kVarString:
        align_by_script(al.view_, va, vb, edit_script(va, vb));
        break;
      case AttributeKind::kFixedString:
        if (va.size() == vb.size() && hamming(va, vb) <= osa_distance(va, vb)) {
          align_positional(al.view_, va, vb);
        } else {
          align_by_script(al.view_, va, vb, edit_script(va, vb));
        }
        break;
      case AttributeKind::kDate:
        if (!attribute.layout.matches(va) || !attribute.layout.matches(vb)) {
          throw Error(ErrorCode::kInvalidArgument,
                      "date values do not match layout " + attribute.layout.text());
        }
        align_date(al.view_, al.element_view_, attribute.layout, va, vb);
        break;
    }
  }
  assign_content_ids(al.view_);
  if (attribute.kind == AttributeKind::kDate && a && b) {
    assign_content_ids(al.element_view_);
  } else {
    al.element_view_ = al.view_;
  }
  return al;
}

std::size_t data_char_count(const Value& value, const Attribute& attribute) {
  if (!value) return 0;
  if (attribute.kind == AttributeKind::kDate) return attribute.layout.data_chars();
  return value->size();
}

std::vector<std::size_t> data_positions(const Value& value, const Attribute& attribute) {
  std::vector<std::size_t> out;
  if (!value) return out;
  for (std::size_t i = 0; i < value->size(); ++i) {
    if (attribute.kind == AttributeKind::kDate && attribute.layout.is_separator(i)) continue;
    out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> positions_for_mode(const PairAlignment& alignment, Side side,
                                            DisplayMode mode, DateGranularity granularity) {
  std::vector<std::size_t> out;
  const auto& value = alignment.value(side);
  if (!value || mode == DisplayMode::kMasked) return out;
  if (mode == DisplayMode::kFull) {
    for (std::size_t i = 0; i < value->size(); ++i) {
      if (is_data_position(alignment, i)) out.push_back(i);
    }
    return out;
  }
  if (alignment.kind() == AttributeKind::kCategory) return out;
  for (const auto& tok : alignment.tokens(side, granularity)) {
    if (tok.kind != TokenKind::kDiscrepant) continue;
    for (std::size_t i = 0; i < tok.text.size(); ++i) {
      if (is_data_position(alignment, tok.begin + i)) out.push_back(tok.begin + i);
    }
  }
  return out;
}

DisplayCell render_revealed(const PairAlignment& alignment, Side side,
                            const std::vector<std::size_t>& revealed, DisplayMode mode,
                            DateGranularity granularity) {
  DisplayCell cell;
  cell.mode = mode;
  const auto& value = alignment.value(side);
  const auto& tokens = alignment.tokens(side, granularity);

  if (!value) {
    cell.rendered = std::string(1, kMissingChar);
    cell.markup.push_back({MarkupKind::kMissing, -1, false});
    return cell;
  }

  std::vector<bool> shown(value->size(), false);
  for (auto p : revealed) {
    if (p >= value->size()) throw Error(ErrorCode::kInvalidArgument, "revealed offset out of range");
    if (is_data_position(alignment, p)) shown[p] = true;
  }
  for (std::size_t i = 0; i < value->size(); ++i) {
    if (is_data_position(alignment, i)) ++cell.n_chars;
    if (shown[i]) {
      ++cell.disclosed_chars;
      cell.revealed_positions.push_back(i);
    }
  }

  if (alignment.kind() == AttributeKind::kCategory) {
    const bool all = cell.disclosed_chars == cell.n_chars;
    const bool discrepant = !tokens.empty() && tokens.front().kind == TokenKind::kDiscrepant;
    const int id = discrepant ? tokens.front().content_id : -1;
    const MarkupKind kind = discrepant ? MarkupKind::kDiscrepant : MarkupKind::kIdentical;
    if (all) {
      cell.rendered = *value;
      cell.markup.assign(value->size(), {kind, id, true});
    } else {
      // Category values are disclosed whole or not at all.
      cell.revealed_positions.clear();
      cell.disclosed_chars = 0;
      cell.rendered = std::string(1, discrepant ? markup_symbol(id) : kMaskChar);
      cell.markup.push_back({kind, id, false});
      cell.not_applicable = mode == DisplayMode::kPartial;
    }
    return cell;
  }

  for (const auto& tok : tokens) {
    for (std::size_t i = 0; i < tok.text.size(); ++i) {
      const std::size_t p = tok.begin + i;
      if (tok.kind != TokenKind::kMissing && !is_data_position(alignment, p)) {
        cell.rendered += tok.text[i];
        cell.markup.push_back({MarkupKind::kSeparator, -1, false});
        continue;
      }
      switch (tok.kind) {
        case TokenKind::kSeparator:
          cell.rendered += tok.text[i];
          cell.markup.push_back({MarkupKind::kSeparator, -1, false});
          break;
        case TokenKind::kIdentical:
          cell.rendered += shown[p] ? tok.text[i] : kMaskChar;
          cell.markup.push_back({MarkupKind::kIdentical, -1, shown[p]});
          break;
        case TokenKind::kDiscrepant:
          cell.rendered += shown[p] ? tok.text[i] : markup_symbol(tok.content_id);
          cell.markup.push_back({MarkupKind::kDiscrepant, tok.content_id, shown[p]});
          break;
        case TokenKind::kMissing:
          break;
      }
    }
  }
  return cell;
}

DisplayCell render(const PairAlignment& alignment, DisplayMode mode, Side side,
                   DateGranularity granularity) {
  return render_revealed(alignment, side, positions_for_mode(alignment, side, mode, granularity),
                         mode, granularity);
}

Rational proportion_disclosed(const DisplayCell& cell) {
  if (cell.n_chars == 0) return Rational(0);
  return Rational(cell.disclosed_chars, cell.n_chars);
}

}  // namespace kapr
