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

#include "fixtures.hpp"
#include "gtest/gtest.h"

namespace kapr {
namespace {

TEST(StateFileTest, ParsesEntriesAndPins) {
  const auto f = parse_state_file("# c\n\n1, Name, 3\n 2 ,DOB, 1 4 \n3, Race, *\nk, 4, 2\n");
  ASSERT_EQ(f.entries.size(), 3u);
  EXPECT_EQ(f.entries[0].row, 0u);
  EXPECT_EQ(f.entries[0].attribute, "Name");
  EXPECT_EQ(*f.entries[0].offsets, std::vector<std::size_t>{3});
  EXPECT_EQ(*f.entries[1].offsets, (std::vector<std::size_t>{1, 4}));
  EXPECT_FALSE(f.entries[2].offsets.has_value());
  EXPECT_EQ(f.pinned_k.at(3), 2);
}

TEST(StateFileTest, ErrorsNameTheLine) {
  for (const char* text : {"1, Name\n", "0, Name, 1\n", "x, Name, 1\n", "1, Name, a\n",
                           "1, , 1\n", "k, 1, 0\n"}) {
    try {
      parse_state_file(std::string("# header\n") + text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kIngestion);
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

TEST(StateFileTest, BuildRejectsCellsOutsideTheDisplay) {
  const auto display = testing::table3_display();
  EXPECT_THROW(build_state(display, parse_state_file("13, Name, 0\n")), Error);
  EXPECT_THROW(build_state(display, parse_state_file("1, Income, 0\n")), Error);
  EXPECT_THROW(build_state(display, parse_state_file("1, Name, 9\n")), Error);
  EXPECT_THROW(build_state(display, parse_state_file("1, Race, 0\n")), Error);
  EXPECT_THROW(build_state(display, parse_state_file("k, 13, 1\n")), Error);
}

TEST(StateFileTest, EmptyFileIsTheMaskedState) {
  const auto s = build_state(testing::table3_display(),
                             load_state_file(testing::data_path("table4_state.txt")));
  EXPECT_EQ(score_of(s, KaprPolicy{}), 0);
  EXPECT_THROW(load_state_file(testing::data_path("no_such_file.txt")), Error);
}

TEST(StateFileTest, PinnedMatrixOverridesOnlyPinnedRows) {
  const auto display = testing::table3_display();
  const auto f = parse_state_file("1, Name, 3\nk, 1, 1\n");
  const auto s = build_state(display, f);
  const auto m = pinned_matrix(s, f);
  EXPECT_EQ(m.k[0], 1);
  EXPECT_EQ(m.k[1], 4);
  EXPECT_EQ(s.k(0), 3u);
}

}  // namespace
}  // namespace kapr
