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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace caplens {

// Word lists used by the annotators. The shipped lists live in
// data/lexicons/ (one UTF-8 entry per line, '#' starts a comment line) and
// are compiled into the library; load_directory() reads an audited copy.
struct Lexicons {
  std::vector<std::string> negation_en;
  std::vector<std::string> negation_de;
  std::vector<std::string> negation_zh;
  std::vector<std::string> negation_exclusions_zh;
  std::vector<std::string> passive_exclusions_zh;
  std::vector<std::string> quantifiers_en;
  std::vector<std::string> quantifiers_zh;
  std::vector<std::string> quantifiers_ja;
  std::vector<std::string> counters_ja;
  std::vector<std::string> numeral_exclusions_zh;
  std::map<std::string, long long, std::less<>> numbers_en;
  std::map<std::string, long long, std::less<>> numbers_de;

  static const Lexicons& builtin();
  static Lexicons load_directory(const std::filesystem::path& dir);
};

// File names, in the order they are loaded.
const std::vector<std::string_view>& lexicon_file_names();

// Raw text of a compiled-in lexicon file; throws for unknown names.
std::string_view builtin_lexicon_file(std::string_view file_name);

std::vector<std::string> parse_word_list(std::string_view content);
std::map<std::string, long long, std::less<>> parse_number_table(std::string_view content);

}  // namespace caplens
