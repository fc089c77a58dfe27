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

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace kapr {

using Rational = boost::multiprecision::cpp_rational;

// "0", "3/4", "31/432"; always reduced.
std::string to_fraction_string(const Rational& r);
// Decimal with `digits` significant digits, e.g. "0.0717592592592593".
std::string to_decimal_string(const Rational& r, int digits = 15);
// Accepts "p/q", integers and plain decimals ("0.25").
Rational parse_rational(std::string_view text);

}  // namespace kapr
