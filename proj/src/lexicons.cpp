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

#include "caplens/lexicons.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "caplens/error.hpp"
#include "caplens/text.hpp"
#include "lexicon_data.hpp"

namespace caplens {

namespace {

constexpr std::string_view kFiles[] = {
    "negation_en.txt",          "negation_de.txt",          "negation_zh.txt",
    "negation_exclusions_zh.txt", "passive_exclusions_zh.txt", "quantifiers_en.txt",
    "quantifiers_zh.txt",       "quantifiers_ja.txt",       "counters_ja.txt",
    "numeral_exclusions_zh.txt", "numbers_en.txt",           "numbers_de.txt",
};

template <typename Source>
Lexicons assemble(Source&& source) {
  Lexicons lex;
  lex.negation_en = parse_word_list(source("negation_en.txt"));
  lex.negation_de = parse_word_list(source("negation_de.txt"));
  lex.negation_zh = parse_word_list(source("negation_zh.txt"));
  lex.negation_exclusions_zh = parse_word_list(source("negation_exclusions_zh.txt"));
  lex.passive_exclusions_zh = parse_word_list(source("passive_exclusions_zh.txt"));
  lex.quantifiers_en = parse_word_list(source("quantifiers_en.txt"));
  lex.quantifiers_zh = parse_word_list(source("quantifiers_zh.txt"));
  lex.quantifiers_ja = parse_word_list(source("quantifiers_ja.txt"));
  lex.counters_ja = parse_word_list(source("counters_ja.txt"));
  lex.numeral_exclusions_zh = parse_word_list(source("numeral_exclusions_zh.txt"));
  lex.numbers_en = parse_number_table(source("numbers_en.txt"));
  lex.numbers_de = parse_number_table(source("numbers_de.txt"));
  return lex;
}

}  // namespace

const std::vector<std::string_view>& lexicon_file_names() {
  static const std::vector<std::string_view> names(std::begin(kFiles), std::end(kFiles));
  return names;
}

std::string_view builtin_lexicon_file(std::string_view file_name) {
  for (const auto& entry : generated::kLexiconFiles) {
    if (entry.name == file_name) return entry.content;
  }
  throw Error(fmt::format("no built-in lexicon '{}'", file_name));
}

std::vector<std::string> parse_word_list(std::string_view content) {
  std::vector<std::string> out;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(text::nfc(line));
  }
  return out;
}

std::map<std::string, long long, std::less<>> parse_number_table(std::string_view content) {
  std::map<std::string, long long, std::less<>> out;
  for (const std::string& row : parse_word_list(content)) {
    const auto tab = row.find('\t');
    long long value = 0;
    const char* first = row.data() + (tab == std::string::npos ? row.size() : tab + 1);
    const char* last = row.data() + row.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (tab == std::string::npos || ec != std::errc() || ptr != last) {
      throw FormatError(fmt::format("number table row '{}' is not 'word<TAB>value'", row));
    }
    out.emplace(row.substr(0, tab), value);
  }
  return out;
}

const Lexicons& Lexicons::builtin() {
  static const Lexicons lex = assemble(builtin_lexicon_file);
  return lex;
}

Lexicons Lexicons::load_directory(const std::filesystem::path& dir) {
  return assemble([&dir](std::string_view name) {
    const auto path = dir / std::string(name);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open lexicon '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  });
}

}  // namespace caplens
