// Copyright 2026 The caplens Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "caplens/lexicons.hpp"
#include "caplens/types.hpp"

namespace caplens {

struct NumeralMatch {
  std::string surface;
  long long value = 0;
  std::size_t position = 0;  // code point offset in the lowercased text

  bool operator==(const NumeralMatch&) const = default;
};

// Cardinal numerals in caption text, in order of appearance:
//  - Arabic digit runs in every language (fullwidth digits too), not glued
//    to Latin letters; grouped thousands ("1,000" / "1.000") are one value,
//    decimals and times are skipped;
//  - En: number words with hyphen/space compounds and hundred/thousand;
//  - De: number words including one-word compounds (einundzwanzig);
//  - Zh: CJK numerals with 十/百/千/万 composition, 两 and 俩 as 2;
//  - Jp: CJK numerals followed by a counter or standing alone; 一 is never
//    read as a numeral.
// Ordinals (2nd, 2. in German, 第三, 三番目) are not reported.
std::vector<NumeralMatch> recognize_numerals(std::string_view text, Language lang,
                                             const Lexicons& lex = Lexicons::builtin());

// Value of a German number word ("einundzwanzig" -> 21), or -1.
long long german_number_value(std::string_view lowercase_word, const Lexicons& lex);

// Values of a run of CJK numeral characters; adjacent digits without a unit
// between them ("三四") are separate values.
std::vector<long long> cjk_run_values(std::u32string_view run);

}  // namespace caplens
