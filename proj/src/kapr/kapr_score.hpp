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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kapr/anonymity.hpp"
#include "kapr/dataset.hpp"
#include "kapr/error.hpp"
#include "kapr/masking.hpp"
#include "kapr/pairs.hpp"
#include "kapr/rational.hpp"

namespace kapr {

// Display rows and attributes are 0-based here; external formats (JSON, state
// files, audit logs) use 1-based rows.
struct CellRef {
  std::size_t row = 0;
  std::size_t attribute = 0;

  friend bool operator==(const CellRef&, const CellRef&) = default;
  friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

struct KaprPolicy {
  std::int64_t kappa = 1;  // minimum allowed anonymity set size
  Rational budget = 1;     // maximum admissible score

  // kappa >= 1, kappa <= records, budget in [0,1].
  void validate(std::size_t records) const;
};

// The information disclosure state in matrix form: proportions p (rows x D)
// and per-row anonymity set sizes k.
struct DisclosureMatrix {
  std::vector<std::vector<Rational>> p;
  std::vector<std::int64_t> k;

  std::size_t rows() const { return p.size(); }
  std::size_t attributes() const { return p.empty() ? 0 : p.front().size(); }
};

struct ScoreBreakdown {
  Rational total;
  std::vector<Rational> rows;                     // K_i
  std::vector<std::vector<Rational>> attribution;  // kappa p_ij / (N D k_i)
  std::int64_t kappa = 1;
  Rational budget = 1;
  std::size_t n_rows = 0;
  std::size_t attributes = 0;

  nlohmann::json to_json() const;
};

nlohmann::json rational_json(const Rational& r);

// K = kappa / (N D) * sum_i (1 / k_i) sum_j |p_ij| with N the number of
// displayed rows. Throws kPolicyViolation when some k_i < kappa.
ScoreBreakdown kapr_score(const DisclosureMatrix& matrix, const KaprPolicy& policy);

// The same score written as a scaled L1,1 norm of the state matrix with
// elements x_ij = p_ij / k_i.
Rational kapr_norm(const std::vector<std::vector<Rational>>& elements, std::int64_t kappa);

// Immutable description of what a worker is shown: the non-sensitive base
// dataset, the candidate pairs and every pair's per-attribute alignment.
class PartialDisplay {
 public:
  PartialDisplay(Dataset base, std::vector<CandidatePair> pairs,
                 DateGranularity granularity = DateGranularity::kCharacter);

  const Dataset& base() const { return base_; }
  const std::vector<CandidatePair>& pairs() const { return pairs_; }
  DateGranularity granularity() const { return granularity_; }
  const AnonymityIndex& index() const { return index_; }

  std::size_t rows() const { return 2 * pairs_.size(); }
  std::size_t attributes() const { return columns_.size(); }
  const Attribute& attribute(std::size_t j) const { return base_.schema().attribute(columns_[j]); }
  std::optional<std::size_t> find_attribute(std::string_view name) const;

  int record_of(std::size_t row) const;
  Side side_of(std::size_t row) const { return row % 2 == 0 ? Side::kA : Side::kB; }
  const CandidatePair& pair_of(std::size_t row) const { return pairs_.at(row / 2); }
  const Value& value(std::size_t row, std::size_t j) const;
  const PairAlignment& alignment(std::size_t row, std::size_t j) const;

  // Offsets exposed on a cell by the given mode.
  std::vector<std::size_t> offsets_for(CellRef cell, DisplayMode mode) const;
  // The mode a single reveal step moves to; categories skip partial.
  std::optional<DisplayMode> next_mode(CellRef cell, DisplayMode current) const;

 private:
  Dataset base_;
  std::vector<CandidatePair> pairs_;
  DateGranularity granularity_;
  std::vector<std::size_t> columns_;
  std::vector<std::vector<PairAlignment>> alignments_;  // [pair][attribute]
  AnonymityIndex index_;
};

class DisclosureState {
 public:
  explicit DisclosureState(std::shared_ptr<const PartialDisplay> display);

  const PartialDisplay& display() const { return *display_; }
  const std::shared_ptr<const PartialDisplay>& display_ptr() const { return display_; }
  std::size_t rows() const { return display_->rows(); }
  std::size_t attributes() const { return display_->attributes(); }

  DisplayMode mode(CellRef c) const { return cell_state(c).mode; }
  const std::vector<std::size_t>& revealed(CellRef c) const { return cell_state(c).offsets; }
  Rational p(CellRef c) const;
  const Rational& p_sum(std::size_t row) const { return p_sum_.at(row); }
  std::size_t k(std::size_t row) const { return k_.at(row); }
  // sum_i p_sum_i / k_i; the score is kappa / (N D) times this.
  const Rational& weighted_sum() const { return weighted_; }

  DisclosedRow disclosed_row(std::size_t row) const;
  DisplayCell cell(CellRef c) const;
  DisclosureMatrix matrix() const;

  // Row p-sum and k if `offsets` were additionally revealed on `c`.
  std::pair<Rational, std::size_t> evaluate_with(CellRef c,
                                                 const std::vector<std::size_t>& offsets) const;

  // Unions `offsets` into the cell and raises its mode to at least `mode`.
  // Only the affected row's p and k are recomputed.
  DisclosureState with_revealed(CellRef c, const std::vector<std::size_t>& offsets,
                                DisplayMode mode) const;

  friend bool operator==(const DisclosureState& a, const DisclosureState& b);

 private:
  struct CellState {
    DisplayMode mode = DisplayMode::kMasked;
    std::vector<std::size_t> offsets;  // sorted, unique

    friend bool operator==(const CellState&, const CellState&) = default;
  };

  const CellState& cell_state(CellRef c) const;
  void check(CellRef c) const;
  DisclosedRow disclosed_row_with(std::size_t row, std::size_t attr,
                                  const std::vector<std::size_t>* extra) const;
  Rational p_sum_with(std::size_t row, std::size_t attr,
                      const std::vector<std::size_t>* extra) const;

  std::shared_ptr<const PartialDisplay> display_;
  std::vector<std::vector<CellState>> cells_;
  std::vector<Rational> p_sum_;
  std::vector<std::size_t> k_;
  Rational weighted_;
};

Rational score_of(const DisclosureState& state, const KaprPolicy& policy);
ScoreBreakdown kapr_score(const DisclosureState& state, const KaprPolicy& policy);
Rational row_contribution(const DisclosureState& state, const KaprPolicy& policy, std::size_t row);

struct RevealPreview {
  CellRef cell;
  DisplayMode target = DisplayMode::kPartial;
  Rational delta;      // K_new - K_old
  Rational new_total;  // K_new
  std::size_t new_k = 0;
  bool admissible = false;
  std::optional<ErrorCode> denial;  // kDowngrade, kInvalidArgument, kKappaFloor, kBudgetExceeded
  std::string reason;
};

struct RevealResult {
  DisclosureState state;
  Rational delta;
  Rational total;
};

RevealPreview preview_reveal(const DisclosureState& state, CellRef cell, DisplayMode target,
                             const KaprPolicy& policy);
// Throws the preview's denial as an Error; the input state is never modified.
RevealResult apply_reveal(const DisclosureState& state, CellRef cell, DisplayMode target,
                          const KaprPolicy& policy);
// One entry per cell not yet in full mode, for the next mode of that cell.
std::vector<RevealPreview> precompute_frontier(const DisclosureState& state,
                                               const KaprPolicy& policy);

}  // namespace kapr
