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

#include "caplens/numerals.hpp"

#include <algorithm>
#include <optional>

#include "caplens/text.hpp"

namespace caplens {

namespace {

constexpr long long kValueCap = 1'000'000'000'000'000LL;

int ascii_digit(char32_t c) {
  if (c >= U'0' && c <= U'9') return static_cast<int>(c - U'0');
  if (c >= 0xFF10 && c <= 0xFF19) return static_cast<int>(c - 0xFF10);  // fullwidth
  return -1;
}

bool is_latin_letter(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') ||
         (c >= 0xC0 && c <= 0x24F && c != 0xD7 && c != 0xF7);
}

bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == 0x3000 || c == 0xA0; }

bool starts_with_at(std::u32string_view text, std::size_t pos, std::u32string_view word) {
  return pos <= text.size() && text.substr(pos).substr(0, word.size()) == word;
}

// CJK digit value; 一 and the 两 family only when `zh`.
int cjk_digit(char32_t c, bool zh) {
  switch (c) {
    case U'〇': case U'零': return 0;
    case U'一': return zh ? 1 : -1;
    case U'二': return 2;
    case U'两': case U'兩': case U'俩': case U'倆': return zh ? 2 : -1;
    case U'三': return 3;
    case U'四': return 4;
    case U'五': return 5;
    case U'六': return 6;
    case U'七': return 7;
    case U'八': return 8;
    case U'九': return 9;
    default: return -1;
  }
}

long long cjk_unit(char32_t c) {
  switch (c) {
    case U'十': return 10;
    case U'百': return 100;
    case U'千': return 1000;
    case U'万': case U'萬': return 10000;
    default: return 0;
  }
}

bool is_cjk_numeral(char32_t c, bool zh) { return cjk_digit(c, zh) >= 0 || cjk_unit(c) > 0; }

// Arabic digit runs, shared by every language.
void scan_digits(std::u32string_view t, Language lang, std::vector<NumeralMatch>& out) {
  const std::size_t n = t.size();
  std::size_t i = 0;
  while (i < n) {
    if (ascii_digit(t[i]) < 0) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    std::vector<std::u32string> groups(1);
    std::u32string separators;
    std::size_t j = i;
    while (true) {
      while (j < n && ascii_digit(t[j]) >= 0) groups.back() += t[j++];
      if (j + 1 < n && (t[j] == U',' || t[j] == U'.') && ascii_digit(t[j + 1]) >= 0) {
        separators += t[j++];
        groups.emplace_back();
        continue;
      }
      break;
    }
    i = j;
    const char32_t prev = start > 0 ? t[start - 1] : 0;
    const char32_t next = j < n ? t[j] : 0;
    if (is_latin_letter(prev) || is_latin_letter(next)) continue;
    if (prev == U'第' || starts_with_at(t, j, U"番目")) continue;  // ordinal
    if ((prev == U':' && start >= 2 && ascii_digit(t[start - 2]) >= 0) ||
        (next == U':' && j + 1 < n && ascii_digit(t[j + 1]) >= 0)) {
      continue;  // clock time
    }
    if (lang == Language::De && separators.empty() && next == U'.' && j + 2 < n &&
        is_space(t[j + 1]) && is_latin_letter(t[j + 2])) {
      continue;  // German ordinal "2. Reihe"
    }
    if (!separators.empty()) {
      const char32_t grouping = lang == Language::De ? U'.' : U',';
      const bool grouped =
          std::all_of(separators.begin(), separators.end(),
                      [&](char32_t s) { return s == grouping; }) &&
          std::all_of(groups.begin() + 1, groups.end(),
                      [](const std::u32string& g) { return g.size() == 3; });
      if (!grouped) continue;  // decimal
    }
    long long value = 0;
    for (const auto& g : groups) {
      for (char32_t c : g) value = std::min(kValueCap, value * 10 + ascii_digit(c));
    }
    out.push_back({text::to_utf8(t.substr(start, j - start)), value, start});
  }
}

// English number words ---------------------------------------------------

enum class WordKind { Other, And, Unit, Teen, Tens, Hundred, Thousand };

struct Word {
  std::size_t begin = 0;
  std::size_t end = 0;
  WordKind kind = WordKind::Other;
  long long value = 0;
};

WordKind english_kind(long long value) {
  if (value < 10) return WordKind::Unit;
  if (value < 20) return WordKind::Teen;
  if (value < 100) return WordKind::Tens;
  if (value == 100) return WordKind::Hundred;
  return WordKind::Thousand;
}

bool may_follow(WordKind prev, WordKind next) {
  switch (prev) {
    case WordKind::Unit:
    case WordKind::Teen:
      return next == WordKind::Hundred || next == WordKind::Thousand;
    case WordKind::Tens:
      return next == WordKind::Unit || next == WordKind::Thousand;
    case WordKind::Hundred:
      return next == WordKind::Unit || next == WordKind::Teen || next == WordKind::Tens ||
             next == WordKind::Thousand;
    case WordKind::Thousand:
      return next == WordKind::Unit || next == WordKind::Teen || next == WordKind::Tens;
    default:
      return false;
  }
}

void scan_english_words(std::u32string_view t, const Lexicons& lex,
                        std::vector<NumeralMatch>& out) {
  std::vector<Word> words;
  for (std::size_t i = 0; i < t.size();) {
    if (!is_latin_letter(t[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < t.size() && is_latin_letter(t[j])) ++j;
    Word w{i, j};
    const std::string s = text::to_utf8(t.substr(i, j - i));
    if (auto it = lex.numbers_en.find(s); it != lex.numbers_en.end()) {
      w.value = it->second;
      w.kind = english_kind(w.value);
    } else if (s == "and") {
      w.kind = WordKind::And;
    }
    words.push_back(w);
    i = j;
  }

  auto joinable = [&](const Word& a, const Word& b) {
    const auto gap = t.substr(a.end, b.begin - a.end);
    return gap == U" " || gap == U"-";
  };

  std::size_t k = 0;
  while (k < words.size()) {
    if (words[k].kind == WordKind::Other || words[k].kind == WordKind::And) {
      ++k;
      continue;
    }
    long long total = 0;
    long long current = 0;
    std::size_t first = k;
    std::size_t last = k;
    auto apply = [&](const Word& w) {
      switch (w.kind) {
        case WordKind::Hundred:
          current = (current == 0 ? 1 : current) * 100;
          break;
        case WordKind::Thousand:
          total += (current == 0 ? 1 : current) * w.value;
          current = 0;
          break;
        default:
          current += w.value;
      }
    };
    apply(words[k]);
    WordKind prev = words[k].kind;
    std::size_t m = k + 1;
    while (m < words.size()) {
      const Word& w = words[m];
      if (w.kind == WordKind::And && m + 1 < words.size() &&
          (prev == WordKind::Hundred || prev == WordKind::Thousand) &&
          joinable(words[m - 1], w) && joinable(w, words[m + 1]) &&
          may_follow(prev, words[m + 1].kind)) {
        ++m;
        continue;
      }
      if (!joinable(words[m - 1], w) || !may_follow(prev, w.kind)) break;
      apply(w);
      prev = w.kind;
      last = m;
      ++m;
    }
    out.push_back({text::to_utf8(t.substr(words[first].begin, words[last].end - words[first].begin)),
                   total + current, words[first].begin});
    k = last + 1;
  }
}

void scan_german_words(std::u32string_view t, const Lexicons& lex,
                       std::vector<NumeralMatch>& out) {
  for (std::size_t i = 0; i < t.size();) {
    if (!is_latin_letter(t[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < t.size() && is_latin_letter(t[j])) ++j;
    const std::string word = text::to_utf8(t.substr(i, j - i));
    if (const long long v = german_number_value(word, lex); v >= 0) {
      out.push_back({word, v, i});
    }
    i = j;
  }
}

// CJK numerals -----------------------------------------------------------

std::vector<bool> exclusion_mask(std::u32string_view t, const std::vector<std::string>& words) {
  std::vector<bool> mask(t.size(), false);
  for (const std::string& w : words) {
    const std::u32string u = text::to_u32(w);
    if (u.empty()) continue;
    for (auto pos = t.find(u); pos != std::u32string_view::npos; pos = t.find(u, pos + 1)) {
      std::fill(mask.begin() + static_cast<std::ptrdiff_t>(pos),
                mask.begin() + static_cast<std::ptrdiff_t>(pos + u.size()), true);
    }
  }
  return mask;
}

std::size_t counter_length(std::u32string_view t, std::size_t pos, const Lexicons& lex) {
  std::size_t best = 0;
  for (const std::string& c : lex.counters_ja) {
    const std::u32string u = text::to_u32(c);
    if (u.size() > best && starts_with_at(t, pos, u)) best = u.size();
  }
  return best;
}

void scan_cjk(std::u32string_view t, Language lang, const Lexicons& lex,
              std::vector<NumeralMatch>& out) {
  const bool zh = lang == Language::Zh;
  const std::vector<bool> mask =
      zh ? exclusion_mask(t, lex.numeral_exclusions_zh) : std::vector<bool>(t.size(), false);
  const std::size_t n = t.size();
  std::size_t i = 0;
  while (i < n) {
    if (mask[i] || !is_cjk_numeral(t[i], zh)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    std::size_t j = i;
    while (j < n && !mask[j] && is_cjk_numeral(t[j], zh)) ++j;
    i = j;
    // A bare 百/千/万 is a morpheme (百货, 千里), not a count.
    while (start < j && cjk_unit(t[start]) > 10) ++start;
    if (start == j) continue;
    const char32_t prev = start > 0 ? t[start - 1] : 0;
    if (prev == U'第' || starts_with_at(t, j, U"番目")) continue;
    if (lang == Language::Jp) {
      const bool counted = counter_length(t, j, lex) > 0;
      const bool alone = (start == 0 || !text::is_cjk_ideograph(prev)) &&
                         (j == n || !text::is_cjk_ideograph(t[j]));
      if (!counted && !alone) continue;
    }
    const std::u32string_view run = t.substr(start, j - start);
    const std::string surface = text::to_utf8(run);
    for (long long v : cjk_run_values(run)) out.push_back({surface, v, start});
  }
}

}  // namespace

long long german_number_value(std::string_view s, const Lexicons& lex) {
  auto table = [&](std::string_view w) -> long long {
    auto it = lex.numbers_de.find(w);
    return it == lex.numbers_de.end() ? -1 : it->second;
  };
  auto unit = [&](std::string_view w) -> long long {
    const long long v = table(w);
    return v >= 1 && v <= 9 ? v : -1;
  };
  auto below100 = [&](std::string_view w) -> long long {
    if (const long long v = table(w); v >= 0 && v < 100) return v;
    for (auto pos = w.find("und"); pos != std::string_view::npos; pos = w.find("und", pos + 1)) {
      const long long u = unit(w.substr(0, pos));
      const long long tens = table(w.substr(pos + 3));
      if (u > 0 && tens >= 20 && tens < 100 && tens % 10 == 0) return u + tens;
    }
    return -1;
  };
  auto below1000 = [&](std::string_view w) -> long long {
    const auto pos = w.find("hundert");
    if (pos == std::string_view::npos) return below100(w);
    const std::string_view left = w.substr(0, pos);
    std::string_view right = w.substr(pos + 7);
    const long long lv = left.empty() ? 1 : unit(left);
    if (lv < 0) return -1;
    if (right.substr(0, 3) == "und") right.remove_prefix(3);
    const long long rv = right.empty() ? 0 : below100(right);
    return rv < 0 ? -1 : lv * 100 + rv;
  };
  if (s.empty()) return -1;
  const auto pos = s.find("tausend");
  if (pos == std::string_view::npos) return below1000(s);
  const std::string_view left = s.substr(0, pos);
  std::string_view right = s.substr(pos + 7);
  const long long lv = left.empty() ? 1 : below1000(left);
  if (lv < 1) return -1;
  if (right.substr(0, 3) == "und") right.remove_prefix(3);
  const long long rv = right.empty() ? 0 : below1000(right);
  return rv < 0 ? -1 : lv * 1000 + rv;
}

std::vector<long long> cjk_run_values(std::u32string_view run) {
  std::vector<long long> values;
  long long total = 0;
  long long section = 0;
  long long number = -1;
  bool last_was_digit = false;
  bool have = false;
  auto flush = [&]() {
    if (have) values.push_back(total + section + std::max(number, 0LL));
    total = section = 0;
    number = -1;
    last_was_digit = have = false;
  };
  for (char32_t c : run) {
    if (const int d = cjk_digit(c, true); d >= 0) {
      if (d == 0 && have && !last_was_digit) continue;  // 一百零五: placeholder zero
      if (last_was_digit) flush();
      number = d;
      last_was_digit = have = true;
    } else if (const long long u = cjk_unit(c); u == 10000) {
      section += std::max(number, 0LL);
      total += (section == 0 ? 1 : section) * u;
      section = 0;
      number = -1;
      last_was_digit = false;
      have = true;
    } else if (u > 0) {
      section += (number >= 0 ? number : 1) * u;
      number = -1;
      last_was_digit = false;
      have = true;
    }
  }
  flush();
  return values;
}

std::vector<NumeralMatch> recognize_numerals(std::string_view utf8, Language lang,
                                             const Lexicons& lex) {
  std::vector<NumeralMatch> out;
  const std::u32string t = text::to_u32(text::lower(utf8));
  switch (lang) {
    case Language::En:
      scan_english_words(t, lex, out);
      break;
    case Language::De:
      scan_german_words(t, lex, out);
      break;
    case Language::Zh:
    case Language::Jp:
      scan_cjk(t, lang, lex, out);
      break;
  }
  scan_digits(t, lang, out);
  std::stable_sort(out.begin(), out.end(), [](const NumeralMatch& a, const NumeralMatch& b) {
    return a.position < b.position;
  });
  return out;
}

}  // namespace caplens
