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

#include <doctest.h>

#include "caplens/numerals.hpp"

using namespace caplens;

namespace {

std::vector<long long> values(std::string_view text, Language lang) {
  std::vector<long long> out;
  for (const NumeralMatch& m : recognize_numerals(text, lang)) out.push_back(m.value);
  return out;
}

using V = std::vector<long long>;

}  // namespace

TEST_SUITE("numerals") {
  TEST_CASE("English words and digits") {
    CHECK(values("Two dogs run on grass", Language::En) == V{2});
    CHECK(values("a group of 12 runners", Language::En) == V{12});
    CHECK(values("one hundred and fifty people", Language::En) == V{150});
    CHECK(values("twenty one", Language::En) == V{21});
    CHECK(values("two thousand three hundred", Language::En) == V{2300});
    CHECK(values("one dog and one cat", Language::En) == V{1, 1});
    CHECK(values("someone is on the phone", Language::En).empty());
  }

  TEST_CASE("digit runs") {
    CHECK(values("a crowd of 1,000 fans", Language::En) == V{1000});
    CHECK(values("1.000 Fans", Language::De) == V{1000});
    CHECK(values("2.5 meters", Language::En).empty());
    CHECK(values("2,5 Meter", Language::De).empty());
    CHECK(values("10:30 on the clock", Language::En).empty());
    CHECK(values("a 2nd place and 7up", Language::En).empty());
    CHECK(values("\xEF\xBC\x93\xE4\xBA\xBA", Language::Zh) == V{3});  // fullwidth 3 + 人
  }

  TEST_CASE("German number words") {
    const Lexicons& lex = Lexicons::builtin();
    CHECK(german_number_value("einundzwanzig", lex) == 21);
    CHECK(german_number_value("zweihundertdreiundvierzig", lex) == 243);
    CHECK(german_number_value("hundertundeins", lex) == 101);
    CHECK(german_number_value("dreitausend", lex) == 3000);
    CHECK(german_number_value("zweig", lex) == -1);
    CHECK(german_number_value("undzwanzig", lex) == -1);
    CHECK(values("Ein Mann mit Hut", Language::De) == V{1});
    CHECK(values("Ein Läufer in der 2. Reihe", Language::De) == V{1});
  }

  TEST_CASE("CJK runs") {
    CHECK(cjk_run_values(U"十二") == V{12});
    CHECK(cjk_run_values(U"二十") == V{20});
    CHECK(cjk_run_values(U"一百零五") == V{105});
    CHECK(cjk_run_values(U"三万五千") == V{35000});
    CHECK(cjk_run_values(U"三四") == V{3, 4});
    CHECK(cjk_run_values(U"两") == V{2});
  }

  TEST_CASE("Chinese") {
    CHECK(values("有两个男人正在打篮球", Language::Zh) == V{2});
    CHECK(values("一个男人", Language::Zh) == V{1});
    CHECK(values("他十分高兴", Language::Zh).empty());
    CHECK(values("第三个人", Language::Zh).empty());
    CHECK(values("百货商店", Language::Zh).empty());
  }

  TEST_CASE("Japanese counters and the character for one") {
    CHECK(values("二人の男性", Language::Jp) == V{2});
    CHECK(values("一人の女性", Language::Jp).empty());
    CHECK(values("統一された服", Language::Jp).empty());
    CHECK(values("三月の公園", Language::Jp).empty());
    CHECK(values("三番目の男性", Language::Jp).empty());
    CHECK(values("数字 五 の看板", Language::Jp) == V{5});
  }

  TEST_CASE("matches are ordered by position") {
    const auto m = recognize_numerals("3 cats and two dogs", Language::En);
    REQUIRE(m.size() == 2);
    CHECK(m[0].value == 3);
    CHECK(m[1].value == 2);
    CHECK(m[1].surface == "two");
    CHECK(m[0].position < m[1].position);
  }
}
