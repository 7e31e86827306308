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

#include "support/gold.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "caplens/error.hpp"
#include "caplens/text.hpp"

namespace caplens::testing {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::filesystem::path test_data_dir() {
  if (const char* env = std::getenv("CAPLENS_TEST_DATA_DIR"); env && *env) return env;
  return CAPLENS_TEST_DATA_DIR;
}

std::vector<GoldCase> load_text_gold(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::vector<GoldCase> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() != 5) throw FormatError(fmt::format("{}: expected 5 fields", path.string()), line_no);
    GoldCase c;
    c.language = language_from_code(f[0]);
    c.property = property_from_code(f[1]);
    c.expected = outcome_from_code(f[2]);
    if (f[3] != "-") c.detail = f[3];
    c.text = f[4];
    c.source = fmt::format("{}:{}", path.filename().string(), line_no);
    c.id = fmt::format("text-{}", line_no);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<GoldCase> load_conllu_gold(const std::filesystem::path& path, Language language) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();

  std::map<std::string, DepSentence> parses;
  for (DepSentence& s : parse_conllu(std::string_view(content))) {
    parses.emplace(s.caption_id, std::move(s));
  }

  std::vector<GoldCase> out;
  std::istringstream lines(content);
  std::string line;
  std::string id;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.rfind('#', 0) != 0) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(line.substr(1, eq - 1));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "caption_id") {
      id = value;
    } else if (key == "text") {
      text = value;
    } else if (key.rfind("gold.", 0) == 0) {
      GoldCase c;
      c.id = id;
      c.language = language;
      c.property = property_from_code(key.substr(5));
      c.expected = outcome_from_code(value);
      c.text = text;
      c.parse = parses.at(id);
      c.source = fmt::format("{}:{}", path.filename().string(), line_no);
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<GoldCase> load_all_gold(const std::filesystem::path& dir) {
  std::vector<GoldCase> all = load_text_gold(dir / "text_gold.tsv");
  for (auto [file, lang] : {std::pair{"en.conllu", Language::En}, std::pair{"de.conllu", Language::De},
                            std::pair{"zh.conllu", Language::Zh}}) {
    auto cases = load_conllu_gold(dir / file, lang);
    all.insert(all.end(), cases.begin(), cases.end());
  }
  return all;
}

std::size_t GoldReport::min_cases() const {
  std::size_t m = cases.empty() ? 0 : cases.begin()->second;
  for (const auto& [key, n] : cases) m = std::min(m, n);
  return m;
}

GoldReport evaluate_gold(const std::vector<GoldCase>& cases) {
  GoldReport report;
  const auto start = std::chrono::steady_clock::now();
  for (const GoldCase& c : cases) {
    const CaptionRecord caption{c.id, "gold", c.language, text::nfc(c.text), Origin::Original};
    const PropertyLabel got =
        annotate(caption, c.property, c.parse ? &*c.parse : nullptr);
    const auto key = std::pair{c.property, c.language};
    ++report.cases[key];
    const bool outcome_ok = got.outcome == c.expected;
    const bool detail_ok = !(c.expected == Outcome::Positive && c.detail) || got.detail == c.detail;
    if (outcome_ok && detail_ok) {
      ++report.agreed[key];
    } else {
      report.mismatches.push_back(fmt::format("{} [{} {}] \"{}\": expected {}{}, got {} ({})", c.source,
                                              to_code(c.language), to_code(c.property), c.text,
                                              to_code(c.expected), c.detail ? " " + *c.detail : "",
                                              to_code(got.outcome), got.detail.value_or("-")));
    }
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace caplens::testing
