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

#include <map>
#include <random>

#include "gtest/gtest.h"
#include "oracles.hpp"

namespace kapr {
namespace {

const Attribute kVar{"Name", AttributeKind::kVarString, AttributeRole::kIdentifier, {}};
const Attribute kFixed{"ID", AttributeKind::kFixedString, AttributeRole::kIdentifier, {}};
const Attribute kDate{"DOB", AttributeKind::kDate, AttributeRole::kQuasiIdentifier, {}};
const Attribute kCat{"Race", AttributeKind::kCategory, AttributeRole::kQuasiIdentifier, {}};

std::string show(const PairAlignment& al, DisplayMode m, Side s,
                 DateGranularity g = DateGranularity::kCharacter) {
  return render(al, m, s, g).rendered;
}

std::string concat(const std::vector<Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += t.text;
  return out;
}

TEST(AlignPairTest, VarStringSuffixIsOneUnitOnSideA) {
  const auto al = align_pair(std::string("SANCHEZ JR"), std::string("SANCHEZ"), kVar);
  ASSERT_EQ(al.units().size(), 1u);
  EXPECT_EQ(al.units()[0].cls, UnitClass::kDelete);
  EXPECT_EQ(al.units()[0].text[0], " JR");
  EXPECT_EQ(al.units()[0].text[1], "");
  EXPECT_EQ(al.units()[0].begin[0], 7u);
  ASSERT_EQ(al.tokens(Side::kB).size(), 1u);
  EXPECT_EQ(al.tokens(Side::kB)[0].kind, TokenKind::kIdentical);
}

TEST(AlignPairTest, FixedStringShiftIsInsertPlusDelete) {
  const auto al = align_pair(std::string("1742682819"), std::string("1742668281"), kFixed);
  ASSERT_EQ(al.units().size(), 2u);
  EXPECT_EQ(al.units()[0].cls, UnitClass::kInsert);
  EXPECT_EQ(al.units()[0].text[1], "6");
  EXPECT_EQ(al.units()[0].begin[1], 5u);
  EXPECT_EQ(al.units()[1].cls, UnitClass::kDelete);
  EXPECT_EQ(al.units()[1].text[0], "9");
  EXPECT_EQ(al.units()[1].begin[0], 9u);
  EXPECT_NE(al.units()[0].content_id[1], al.units()[1].content_id[0]);
}

TEST(AlignPairTest, FixedStringPrefersPositionalComparison) {
  const auto al = align_pair(std::string("12345"), std::string("12945"), kFixed);
  ASSERT_EQ(al.units().size(), 1u);
  EXPECT_EQ(al.units()[0].cls, UnitClass::kDiffer);
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kA), "**3**");
}

TEST(AlignPairTest, DateSwapSharesContentIdsAcrossSides) {
  const auto al = align_pair(std::string("08/09/1964"), std::string("09/08/1964"), kDate);
  const auto& el = al.units(DateGranularity::kElement);
  ASSERT_EQ(el.size(), 2u);
  EXPECT_EQ(el[0].cls, UnitClass::kElementSwap);
  EXPECT_EQ(el[1].cls, UnitClass::kElementSwap);
  EXPECT_EQ(el[0].content_id[0], el[1].content_id[1]);  // "08"
  EXPECT_EQ(el[1].content_id[0], el[0].content_id[1]);  // "09"
  // Character level: second digit of month and of day differ; year identical.
  const auto& ch = al.units(DateGranularity::kCharacter);
  ASSERT_EQ(ch.size(), 2u);
  EXPECT_EQ(ch[0].begin[0], 1u);
  EXPECT_EQ(ch[1].begin[0], 4u);
  EXPECT_EQ(ch[0].cls, UnitClass::kElementSwap);
  EXPECT_EQ(concat(al.tokens(Side::kA)), "08/09/1964");
  EXPECT_EQ(concat(al.tokens(Side::kB, DateGranularity::kElement)), "09/08/1964");
}

TEST(AlignPairTest, EqualValuesAreOneIdenticalRun) {
  const auto al = align_pair(std::string("Mary"), std::string("Mary"), kVar);
  EXPECT_TRUE(al.identical());
  ASSERT_EQ(al.tokens(Side::kA).size(), 1u);
  EXPECT_EQ(al.tokens(Side::kA)[0].kind, TokenKind::kIdentical);
  EXPECT_EQ(al.tokens(Side::kA)[0].text, "Mary");
}

TEST(AlignPairTest, CategoryIsOneToken) {
  const auto diff = align_pair(std::string("White"), std::string("Asian"), kCat);
  ASSERT_EQ(diff.tokens(Side::kA).size(), 1u);
  EXPECT_EQ(diff.units().size(), 1u);
  const auto same = align_pair(std::string("Black"), std::string("Black"), kCat);
  ASSERT_EQ(same.tokens(Side::kB).size(), 1u);
  EXPECT_TRUE(same.identical());
}

TEST(AlignPairTest, MissingValueIsMissingUnit) {
  const auto al = align_pair(std::string("Mary"), std::nullopt, kVar);
  ASSERT_EQ(al.units().size(), 1u);
  EXPECT_EQ(al.units()[0].cls, UnitClass::kMissing);
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kA), "@@@@");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kA), "Mary");
  EXPECT_EQ(show(al, DisplayMode::kFull, Side::kB), "?");
  const auto cell = render(al, DisplayMode::kFull, Side::kB);
  EXPECT_EQ(cell.n_chars, 0u);
  EXPECT_EQ(proportion_disclosed(cell), 0);
  EXPECT_EQ(cell.markup.front().kind, MarkupKind::kMissing);
}

TEST(AlignPairTest, MissingPartnerKeepsDateSeparators) {
  const auto al = align_pair(std::string("08/09/1964"), std::nullopt, kDate);
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kA), "@@/@@/@@@@");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kA), "08/09/1964");
  const auto offsets = positions_for_mode(al, Side::kA, DisplayMode::kPartial,
                                          DateGranularity::kCharacter);
  EXPECT_EQ(offsets.size(), 8u);
  EXPECT_EQ(render(al, DisplayMode::kPartial, Side::kA).n_chars, 8u);
}

// Display strings from the attribute examples table.
TEST(RenderTest, IdentifierStringRow) {
  const auto al = align_pair(std::string("1742682819"), std::string("1742668281"), kFixed);
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kA), "*********@");
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kB), "*****&****");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kA), "*********9");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kB), "*****6****");
  EXPECT_EQ(show(al, DisplayMode::kFull, Side::kA), "1742682819");
  EXPECT_EQ(show(al, DisplayMode::kFull, Side::kB), "1742668281");
}

TEST(RenderTest, NameVarcharRow) {
  const auto al = align_pair(std::string("SANCHEZ JR"), std::string("SANCHEZ"), kVar);
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kA), "*******@@@");
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kB), "*******");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kA), "******* JR");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kB), "*******");
  EXPECT_EQ(show(al, DisplayMode::kFull, Side::kA), "SANCHEZ JR");
  EXPECT_EQ(show(al, DisplayMode::kFull, Side::kB), "SANCHEZ");
}

TEST(RenderTest, DobDateRowElementGranularity) {
  const auto al = align_pair(std::string("08/09/1964"), std::string("09/08/1964"), kDate);
  const auto g = DateGranularity::kElement;
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kA, g), "@@/&&/****");
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kB, g), "&&/@@/****");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kA, g), "08/09/****");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kB, g), "09/08/****");
  EXPECT_EQ(show(al, DisplayMode::kFull, Side::kA, g), "08/09/1964");
  EXPECT_EQ(show(al, DisplayMode::kFull, Side::kB, g), "09/08/1964");
}

TEST(RenderTest, DobDateRowCharacterGranularity) {
  const auto al = align_pair(std::string("08/09/1964"), std::string("09/08/1964"), kDate);
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kA), "*@/*&/****");
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kB), "*&/*@/****");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kA), "*8/*9/****");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kB), "*9/*8/****");
}

TEST(RenderTest, RaceCategoryRow) {
  const auto al = align_pair(std::string("White"), std::string("Asian"), kCat);
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kA), "@");
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kB), "&");
  const auto partial = render(al, DisplayMode::kPartial, Side::kA);
  EXPECT_TRUE(partial.not_applicable);
  EXPECT_EQ(partial.rendered, "@");
  EXPECT_EQ(partial.disclosed_chars, 0u);
  EXPECT_EQ(show(al, DisplayMode::kFull, Side::kA), "White");
  EXPECT_EQ(show(al, DisplayMode::kFull, Side::kB), "Asian");
  const auto same = align_pair(std::string("Black"), std::string("Black"), kCat);
  EXPECT_EQ(show(same, DisplayMode::kMasked, Side::kA), "*");
}

TEST(RenderTest, MaskedAndPartialNamesOfWorkedExample) {
  const auto al = align_pair(std::string("Mary"), std::string("Mark"), kVar);
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kA), "***@");
  EXPECT_EQ(show(al, DisplayMode::kMasked, Side::kB), "***&");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kA), "***y");
  EXPECT_EQ(show(al, DisplayMode::kPartial, Side::kB), "***k");
  const auto same = align_pair(std::string("Mary"), std::string("Mary"), kVar);
  EXPECT_EQ(show(same, DisplayMode::kPartial, Side::kA), "****");
}

TEST(RenderTest, MarkupMapIsParallelToText) {
  const auto al = align_pair(std::string("08/09/1964"), std::string("09/08/1964"), kDate);
  const auto cell = render(al, DisplayMode::kPartial, Side::kA);
  ASSERT_EQ(cell.markup.size(), cell.rendered.size());
  EXPECT_EQ(cell.markup[0].kind, MarkupKind::kIdentical);
  EXPECT_EQ(cell.markup[1].kind, MarkupKind::kDiscrepant);
  EXPECT_TRUE(cell.markup[1].shown);
  EXPECT_EQ(cell.markup[2].kind, MarkupKind::kSeparator);
  EXPECT_EQ(cell.markup[4].token_id, render(al, DisplayMode::kMasked, Side::kB).markup[1].token_id);
}

TEST(ProportionDisclosedTest, WorkedExampleFractions) {
  const auto names = align_pair(std::string("Mary"), std::string("Mark"), kVar);
  EXPECT_EQ(proportion_disclosed(render(names, DisplayMode::kPartial, Side::kA)), Rational(1, 4));
  const auto dob = align_pair(std::string("08/09/1964"), std::string("09/08/1964"), kDate);
  const auto cell = render(dob, DisplayMode::kPartial, Side::kA);
  EXPECT_EQ(cell.n_chars, 8u);
  EXPECT_EQ(cell.disclosed_chars, 2u);
  EXPECT_EQ(proportion_disclosed(cell), Rational(2, 8));
  EXPECT_EQ(proportion_disclosed(render(dob, DisplayMode::kMasked, Side::kA)), 0);
  EXPECT_EQ(proportion_disclosed(render(dob, DisplayMode::kFull, Side::kB)), 1);
  const auto name = align_pair(std::string("SANCHEZ JR"), std::string("SANCHEZ"), kVar);
  EXPECT_EQ(render(name, DisplayMode::kFull, Side::kA).n_chars, 10u);  // space counts
}

// Randomized invariants.

const Attribute& pick_attribute(std::mt19937_64& rng) {
  static const Attribute kShortDate{"D", AttributeKind::kDate, AttributeRole::kQuasiIdentifier,
                                    DateLayout("MM/DD")};
  static const Attribute* all[] = {&kVar, &kFixed, &kShortDate, &kCat};
  return *all[std::uniform_int_distribution<int>(0, 3)(rng)];
}

Value random_value(std::mt19937_64& rng, const Attribute& attr) {
  if (std::bernoulli_distribution(0.05)(rng)) return std::nullopt;
  if (attr.kind == AttributeKind::kDate) {
    std::string s = "00/00";
    for (std::size_t p : {0u, 1u, 3u, 4u}) s[p] = "012"[std::uniform_int_distribution<int>(0, 2)(rng)];
    return s;
  }
  return testing::random_string(rng, "abc", 1, 7);
}

TEST(MaskingProperty, RenderingInvariants) {
  std::mt19937_64 rng(4242);
  for (int iter = 0; iter < 3000; ++iter) {
    const auto& attr = pick_attribute(rng);
    const Value a = random_value(rng, attr);
    const Value b = std::bernoulli_distribution(0.2)(rng) ? a : random_value(rng, attr);
    const auto al = align_pair(a, b, attr);
    for (auto g : {DateGranularity::kCharacter, DateGranularity::kElement}) {
      for (Side s : {Side::kA, Side::kB}) {
        if (al.value(s)) EXPECT_EQ(concat(al.tokens(s, g)), *al.value(s));
        std::size_t prev = 0;
        for (auto m : {DisplayMode::kMasked, DisplayMode::kPartial, DisplayMode::kFull}) {
          const auto cell = render(al, m, s, g);
          EXPECT_EQ(cell, render(al, m, s, g));  // deterministic
          EXPECT_LE(prev, cell.disclosed_chars);
          EXPECT_LE(cell.disclosed_chars, cell.n_chars);
          EXPECT_EQ(cell.markup.size(), cell.rendered.size());
          if (m == DisplayMode::kMasked) EXPECT_EQ(cell.disclosed_chars, 0u);
          if (m == DisplayMode::kFull) EXPECT_EQ(cell.disclosed_chars, cell.n_chars);
          prev = cell.disclosed_chars;
        }
      }
      if (a == b) {
        for (auto m : {DisplayMode::kMasked, DisplayMode::kPartial, DisplayMode::kFull}) {
          EXPECT_EQ(render(al, m, Side::kA, g), render(al, m, Side::kB, g));
        }
      }
      // Content-token rule: equal ids exactly when equal text.
      std::map<int, std::string> text_of;
      std::map<std::string, int> id_of;
      for (Side s : {Side::kA, Side::kB}) {
        for (const auto& t : al.tokens(s, g)) {
          if (t.kind != TokenKind::kDiscrepant) continue;
          auto [it1, new1] = text_of.emplace(t.content_id, t.text);
          EXPECT_EQ(it1->second, t.text);
          auto [it2, new2] = id_of.emplace(t.text, t.content_id);
          EXPECT_EQ(it2->second, t.content_id);
        }
      }
      // With at most four distinct contents the visible symbols follow the same rule.
      if (id_of.size() <= 4) {
        std::map<char, int> symbol_owner;
        for (const auto& [text, id] : id_of) {
          auto [it, fresh] = symbol_owner.emplace(markup_symbol(id), id);
          EXPECT_EQ(it->second, id);
        }
      }
    }
  }
}

// Partial mode on var-strings reveals exactly the characters an exhaustive
// minimal edit-script search marks as edited.
TEST(MaskingProperty, PartialVarStringMatchesExhaustiveEditScript) {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 1500; ++iter) {
    const auto a = testing::random_string(rng, "abc", 1, 8);
    const auto b = testing::random_string(rng, "abc", 1, 8);
    const auto al = align_pair(a, b, kVar);
    for (int side = 0; side < 2; ++side) {
      const auto cell = render(al, DisplayMode::kPartial, static_cast<Side>(side));
      const auto expected = testing::brute_force_edited(a, b, side);
      ASSERT_EQ(cell.revealed_positions, expected) << a << " / " << b << " side " << side;
      ASSERT_EQ(cell.disclosed_chars, expected.size());
    }
  }
}

}  // namespace
}  // namespace kapr
