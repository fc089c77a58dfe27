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

#include "kapr/rational.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "kapr/error.hpp"

namespace kapr {

namespace mp = boost::multiprecision;

std::string to_fraction_string(const Rational& r) {
  const auto num = mp::numerator(r);
  const auto den = mp::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string to_decimal_string(const Rational& r, int digits) {
  if (r == 0) return "0";
  using Dec = mp::number<mp::cpp_dec_float<60>>;
  const Dec value = Dec(mp::numerator(r)) / Dec(mp::denominator(r));
  return value.str(digits, std::ios_base::fmtflags(0));
}

Rational parse_rational(std::string_view text) {
  const std::string s(text);
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      const mp::cpp_int num(s.substr(0, slash));
      const mp::cpp_int den(s.substr(slash + 1));
      if (den == 0) throw Error(ErrorCode::kInvalidArgument, "zero denominator in '" + s + "'");
      return Rational(num, den);
    }
    if (auto dot = s.find('.'); dot != std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      if (digits.empty() || digits == "-") throw Error(ErrorCode::kInvalidArgument, "bad number");
      mp::cpp_int den = 1;
      for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
      return Rational(mp::cpp_int(digits), den);
    }
    return Rational(mp::cpp_int(s));
  } catch (const std::runtime_error&) {
    throw Error(ErrorCode::kInvalidArgument, "not a number: '" + s + "'");
  }
}

}  // namespace kapr
