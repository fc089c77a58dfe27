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

#include "kapr/kapr_score.hpp"

#include <algorithm>

namespace kapr {
namespace {

Rational scale(std::int64_t kappa, std::size_t rows, std::size_t attributes) {
  if (rows == 0 || attributes == 0) return Rational(0);
  return Rational(kappa) / Rational(static_cast<std::int64_t>(rows * attributes));
}

std::string row_label(std::size_t row) { return "row " + std::to_string(row + 1); }

}  // namespace

void KaprPolicy::validate(std::size_t records) const {
  if (kappa < 1) throw Error(ErrorCode::kInvalidArgument, "kappa must be at least 1");
  if (records > 0 && static_cast<std::size_t>(kappa) > records) {
    throw Error(ErrorCode::kInvalidArgument,
                "kappa " + std::to_string(kappa) + " exceeds the " + std::to_string(records) +
                    " records of the dataset");
  }
  if (budget < 0 || budget > 1) throw Error(ErrorCode::kInvalidArgument, "budget must lie in [0,1]");
}

nlohmann::json rational_json(const Rational& r) {
  return {{"fraction", to_fraction_string(r)}, {"decimal", to_decimal_string(r)}};
}

nlohmann::json ScoreBreakdown::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) rows_json.push_back(rational_json(r));
  nlohmann::json cells_json = nlohmann::json::array();
  for (const auto& row : attribution) {
    nlohmann::json one = nlohmann::json::array();
    for (const auto& c : row) one.push_back(to_fraction_string(c));
    cells_json.push_back(std::move(one));
  }
  return {{"K", rational_json(total)},
          {"rows", std::move(rows_json)},
          {"attribution", std::move(cells_json)},
          {"kappa", kappa},
          {"budget", rational_json(budget)},
          {"n_rows", n_rows},
          {"D", attributes}};
}

ScoreBreakdown kapr_score(const DisclosureMatrix& matrix, const KaprPolicy& policy) {
  if (matrix.k.size() != matrix.p.size()) {
    throw Error(ErrorCode::kInvalidArgument, "p and k disagree on the number of rows");
  }
  ScoreBreakdown out;
  out.kappa = policy.kappa;
  out.budget = policy.budget;
  out.n_rows = matrix.rows();
  out.attributes = matrix.attributes();
  const Rational c = scale(policy.kappa, out.n_rows, out.attributes);
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    if (matrix.p[i].size() != out.attributes) {
      throw Error(ErrorCode::kInvalidArgument, "ragged p matrix");
    }
    if (matrix.k[i] < policy.kappa) {
      throw Error(ErrorCode::kPolicyViolation,
                  row_label(i) + " has anonymity set size " + std::to_string(matrix.k[i]) +
                      " below kappa " + std::to_string(policy.kappa));
    }
    Rational row_sum = 0;
    std::vector<Rational> cells;
    for (const auto& p : matrix.p[i]) {
      const Rational cell = c * abs(p) / matrix.k[i];
      cells.push_back(cell);
      row_sum += cell;
    }
    out.total += row_sum;
    out.rows.push_back(row_sum);
    out.attribution.push_back(std::move(cells));
  }
  return out;
}

Rational kapr_norm(const std::vector<std::vector<Rational>>& elements, std::int64_t kappa) {
  Rational l11 = 0;
  for (const auto& row : elements) {
    for (const auto& x : row) l11 += abs(x);
  }
  const std::size_t cols = elements.empty() ? 0 : elements.front().size();
  return scale(kappa, elements.size(), cols) * l11;
}

// ---------------------------------------------------------------------------
// PartialDisplay

PartialDisplay::PartialDisplay(Dataset base, std::vector<CandidatePair> pairs,
                               DateGranularity granularity)
    : base_(std::move(base)),
      pairs_(std::move(pairs)),
      granularity_(granularity),
      columns_(base_.schema().non_sensitive()),
      index_(base_) {
  alignments_.reserve(pairs_.size());
  for (const auto& pair : pairs_) {
    if (pair.first >= pair.second) {
      throw Error(ErrorCode::kInvalidArgument, "pair " + to_string(pair) + " is not ordered");
    }
    const auto& a = base_.by_label(pair.first);
    const auto& b = base_.by_label(pair.second);
    std::vector<PairAlignment> per_attr;
    per_attr.reserve(columns_.size());
    for (auto col : columns_) {
      per_attr.push_back(align_pair(a.values[col], b.values[col], base_.schema().attribute(col)));
    }
    alignments_.push_back(std::move(per_attr));
  }
}

std::optional<std::size_t> PartialDisplay::find_attribute(std::string_view name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (attribute(j).name == name) return j;
  }
  return std::nullopt;
}

int PartialDisplay::record_of(std::size_t row) const {
  const auto& pair = pair_of(row);
  return side_of(row) == Side::kA ? pair.first : pair.second;
}

const Value& PartialDisplay::value(std::size_t row, std::size_t j) const {
  return base_.by_label(record_of(row)).values.at(columns_.at(j));
}

const PairAlignment& PartialDisplay::alignment(std::size_t row, std::size_t j) const {
  return alignments_.at(row / 2).at(j);
}

std::vector<std::size_t> PartialDisplay::offsets_for(CellRef cell, DisplayMode mode) const {
  return positions_for_mode(alignment(cell.row, cell.attribute), side_of(cell.row), mode,
                            granularity_);
}

std::optional<DisplayMode> PartialDisplay::next_mode(CellRef cell, DisplayMode current) const {
  switch (current) {
    case DisplayMode::kMasked:
      return attribute(cell.attribute).kind == AttributeKind::kCategory ? DisplayMode::kFull
                                                                        : DisplayMode::kPartial;
    case DisplayMode::kPartial:
      return DisplayMode::kFull;
    case DisplayMode::kFull:
      return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// DisclosureState

DisclosureState::DisclosureState(std::shared_ptr<const PartialDisplay> display)
    : display_(std::move(display)) {
  if (!display_) throw Error(ErrorCode::kInvalidArgument, "null display");
  cells_.assign(display_->rows(), std::vector<CellState>(display_->attributes()));
  p_sum_.assign(display_->rows(), Rational(0));
  k_.assign(display_->rows(), display_->base().size());
  weighted_ = 0;
}

void DisclosureState::check(CellRef c) const {
  if (c.row >= rows() || c.attribute >= attributes()) {
    throw Error(ErrorCode::kInvalidArgument, "cell (" + std::to_string(c.row + 1) + ", " +
                                                 std::to_string(c.attribute + 1) +
                                                 ") is outside the display");
  }
}

const DisclosureState::CellState& DisclosureState::cell_state(CellRef c) const {
  check(c);
  return cells_[c.row][c.attribute];
}

Rational DisclosureState::p(CellRef c) const {
  const auto& st = cell_state(c);
  const auto n = data_char_count(display_->value(c.row, c.attribute),
                                 display_->attribute(c.attribute));
  if (n == 0) return Rational(0);
  return Rational(static_cast<std::int64_t>(st.offsets.size()), static_cast<std::int64_t>(n));
}

DisclosedRow DisclosureState::disclosed_row_with(std::size_t row, std::size_t attr,
                                                 const std::vector<std::size_t>* extra) const {
  DisclosedRow out;
  out.cells.reserve(attributes());
  for (std::size_t j = 0; j < attributes(); ++j) {
    std::vector<std::size_t> offsets = cells_[row][j].offsets;
    if (extra != nullptr && j == attr) offsets.insert(offsets.end(), extra->begin(), extra->end());
    out.cells.push_back(
        make_revealed_cell(display_->value(row, j), display_->attribute(j), offsets));
  }
  return out;
}

Rational DisclosureState::p_sum_with(std::size_t row, std::size_t attr,
                                     const std::vector<std::size_t>* extra) const {
  const auto disclosed = disclosed_row_with(row, attr, extra);
  Rational sum = 0;
  for (std::size_t j = 0; j < attributes(); ++j) {
    const auto n = data_char_count(display_->value(row, j), display_->attribute(j));
    if (n == 0) continue;
    sum += Rational(static_cast<std::int64_t>(disclosed.cells[j].chars.size()),
                    static_cast<std::int64_t>(n));
  }
  return sum;
}

DisclosedRow DisclosureState::disclosed_row(std::size_t row) const {
  check({row, 0});
  return disclosed_row_with(row, 0, nullptr);
}

DisplayCell DisclosureState::cell(CellRef c) const {
  const auto& st = cell_state(c);
  return render_revealed(display_->alignment(c.row, c.attribute), display_->side_of(c.row),
                         st.offsets, st.mode, display_->granularity());
}

DisclosureMatrix DisclosureState::matrix() const {
  DisclosureMatrix m;
  for (std::size_t i = 0; i < rows(); ++i) {
    std::vector<Rational> row;
    for (std::size_t j = 0; j < attributes(); ++j) row.push_back(p({i, j}));
    m.p.push_back(std::move(row));
    m.k.push_back(static_cast<std::int64_t>(k_[i]));
  }
  return m;
}

std::pair<Rational, std::size_t> DisclosureState::evaluate_with(
    CellRef c, const std::vector<std::size_t>& offsets) const {
  check(c);
  const auto row = disclosed_row_with(c.row, c.attribute, &offsets);
  Rational sum = 0;
  for (std::size_t j = 0; j < attributes(); ++j) {
    const auto n = data_char_count(display_->value(c.row, j), display_->attribute(j));
    if (n == 0) continue;
    sum += Rational(static_cast<std::int64_t>(row.cells[j].chars.size()),
                    static_cast<std::int64_t>(n));
  }
  return {sum, display_->index().anonymity_set_size(row)};
}

DisclosureState DisclosureState::with_revealed(CellRef c, const std::vector<std::size_t>& offsets,
                                               DisplayMode mode) const {
  check(c);
  const auto& value = display_->value(c.row, c.attribute);
  const auto& attr = display_->attribute(c.attribute);
  const auto valid = data_positions(value, attr);
  std::vector<std::size_t> merged = cells_[c.row][c.attribute].offsets;
  for (auto off : offsets) {
    if (!std::binary_search(valid.begin(), valid.end(), off)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "offset " + std::to_string(off) + " is not a data character of " + attr.name);
    }
    merged.push_back(off);
  }
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  if (attr.kind == AttributeKind::kCategory && !merged.empty() && merged.size() != valid.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "category attribute " + attr.name + " is disclosed whole or not at all");
  }
  // Revealing every data character is full disclosure.
  if (!valid.empty() && merged.size() == valid.size()) mode = DisplayMode::kFull;

  DisclosureState next = *this;
  auto& cell = next.cells_[c.row][c.attribute];
  cell.offsets = std::move(merged);
  cell.mode = std::max(cell.mode, mode);
  const auto& row = c.row;
  next.weighted_ -= p_sum_[row] / Rational(static_cast<std::int64_t>(k_[row]));
  next.p_sum_[row] = next.p_sum_with(row, 0, nullptr);
  next.k_[row] = display_->index().anonymity_set_size(next.disclosed_row(row));
  if (next.k_[row] == 0) {
    throw Error(ErrorCode::kInternal, row_label(row) + " is consistent with no record");
  }
  next.weighted_ += next.p_sum_[row] / Rational(static_cast<std::int64_t>(next.k_[row]));
  return next;
}

bool operator==(const DisclosureState& a, const DisclosureState& b) {
  return a.display_ == b.display_ && a.cells_ == b.cells_ && a.p_sum_ == b.p_sum_ &&
         a.k_ == b.k_ && a.weighted_ == b.weighted_;
}

// ---------------------------------------------------------------------------
// Scoring and reveals

Rational score_of(const DisclosureState& state, const KaprPolicy& policy) {
  return scale(policy.kappa, state.rows(), state.attributes()) * state.weighted_sum();
}

ScoreBreakdown kapr_score(const DisclosureState& state, const KaprPolicy& policy) {
  return kapr_score(state.matrix(), policy);
}

Rational row_contribution(const DisclosureState& state, const KaprPolicy& policy,
                          std::size_t row) {
  if (row >= state.rows()) {
    throw Error(ErrorCode::kInvalidArgument, row_label(row) + " is outside the display");
  }
  if (static_cast<std::int64_t>(state.k(row)) < policy.kappa) {
    throw Error(ErrorCode::kPolicyViolation, row_label(row) + " is below kappa");
  }
  return scale(policy.kappa, state.rows(), state.attributes()) * state.p_sum(row) /
         Rational(static_cast<std::int64_t>(state.k(row)));
}

RevealPreview preview_reveal(const DisclosureState& state, CellRef cell, DisplayMode target,
                             const KaprPolicy& policy) {
  RevealPreview out;
  out.cell = cell;
  out.target = target;
  const DisplayMode current = state.mode(cell);
  const Rational old_total = score_of(state, policy);
  out.new_total = old_total;
  out.new_k = state.k(cell.row);

  if (target <= current) {
    out.denial = ErrorCode::kDowngrade;
    out.reason = "cell is already " + std::string(to_string(current)) + "; cannot move to " +
                 std::string(to_string(target));
    return out;
  }
  const auto& attr = state.display().attribute(cell.attribute);
  if (attr.kind == AttributeKind::kCategory && target == DisplayMode::kPartial) {
    out.denial = ErrorCode::kInvalidArgument;
    out.reason = "partial disclosure is not available for category attribute " + attr.name;
    return out;
  }

  const auto offsets = state.display().offsets_for(cell, target);
  const auto [p_sum, k] = state.evaluate_with(cell, offsets);
  const std::size_t row = cell.row;
  Rational weighted = state.weighted_sum();
  weighted -= state.p_sum(row) / Rational(static_cast<std::int64_t>(state.k(row)));
  if (k > 0) weighted += p_sum / Rational(static_cast<std::int64_t>(k));
  out.new_k = k;
  out.new_total = scale(policy.kappa, state.rows(), state.attributes()) * weighted;
  out.delta = out.new_total - old_total;

  if (static_cast<std::int64_t>(k) < policy.kappa) {
    out.denial = ErrorCode::kKappaFloor;
    out.reason = "kappa: anonymity set of " + row_label(row) + " would shrink to " +
                 std::to_string(k) + " < " + std::to_string(policy.kappa);
  } else if (out.new_total > policy.budget) {
    out.denial = ErrorCode::kBudgetExceeded;
    out.reason = "budget: score would reach " + to_decimal_string(out.new_total) +
                 " > budget " + to_decimal_string(policy.budget);
  } else {
    out.admissible = true;
  }
  return out;
}

RevealResult apply_reveal(const DisclosureState& state, CellRef cell, DisplayMode target,
                          const KaprPolicy& policy) {
  const auto preview = preview_reveal(state, cell, target, policy);
  if (!preview.admissible) throw Error(*preview.denial, preview.reason);
  auto next = state.with_revealed(cell, state.display().offsets_for(cell, target), target);
  const Rational total = score_of(next, policy);
  const Rational delta = total - score_of(state, policy);
  return {std::move(next), delta, total};
}

std::vector<RevealPreview> precompute_frontier(const DisclosureState& state,
                                               const KaprPolicy& policy) {
  std::vector<RevealPreview> out;
  for (std::size_t i = 0; i < state.rows(); ++i) {
    for (std::size_t j = 0; j < state.attributes(); ++j) {
      const CellRef c{i, j};
      if (auto next = state.display().next_mode(c, state.mode(c))) {
        out.push_back(preview_reveal(state, c, *next, policy));
      }
    }
  }
  return out;
}

}  // namespace kapr
