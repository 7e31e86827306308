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

#include "caplens/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "caplens/analysis.hpp"
#include "caplens/error.hpp"

namespace caplens {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::filesystem::path> files_with_extension(const std::filesystem::path& dir,
                                                        std::string_view ext) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(fmt::format("missing results artifact: directory '{}'", dir.string()));
  }
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext &&
        entry.path().string().find(".manifest.") == std::string::npos) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) {
    throw Error(fmt::format("missing results artifact: no '*{}' file in '{}'", ext, dir.string()));
  }
  return out;
}

std::string property_header() {
  std::string out;
  for (Property p : kAllProperties) out += fmt::format(",{}", display_name(p));
  return out;
}

const std::vector<std::string> kTagOrder = {"none", "moco", "imagenet", "clip"};

std::size_t tag_rank(const std::string& tag) {
  const auto it = std::find(kTagOrder.begin(), kTagOrder.end(), tag);
  return static_cast<std::size_t>(it - kTagOrder.begin());
}

struct CvCell {
  std::string value;
  std::filesystem::path source;
};

// Row key -> property -> cell.
using CvTable = std::map<std::pair<std::string, std::string>, std::map<Property, CvCell>>;

void put_cell(CvTable& table, const std::pair<std::string, std::string>& key, const CvResult& r,
              const std::filesystem::path& source) {
  auto& row = table[key];
  if (auto it = row.find(r.property); it != row.end()) {
    throw ValidationError(fmt::format("'{}' and '{}' both report {} for {}",
                                      it->second.source.string(), source.string(),
                                      display_name(r.property), key.first + " " + key.second));
  }
  row[r.property] = {r.cell(), source};
}

void write_cv_table(const CvTable& table, bool with_language, const std::filesystem::path& path,
                    std::vector<std::filesystem::path>& written) {
  std::vector<std::pair<std::string, std::string>> keys;
  for (const auto& [key, row] : table) keys.push_back(key);
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    if (tag_rank(a.second) != tag_rank(b.second)) return tag_rank(a.second) < tag_rank(b.second);
    return a.second < b.second;
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << (with_language ? "language,pretraining" : "pretraining") << property_header() << '\n';
  for (const auto& key : keys) {
    if (with_language) out << csv_field(key.first) << ',';
    out << csv_field(key.second);
    const auto& row = table.at(key);
    for (Property p : kAllProperties) {
      out << ',';
      if (auto it = row.find(p); it != row.end()) out << csv_field(it->second.value);
    }
    out << '\n';
  }
  written.push_back(path);
}

}  // namespace

std::string prevalence_to_json(std::span<const PrevalenceCell> cells) {
  nlohmann::ordered_json j;
  j["cells"] = nlohmann::ordered_json::array();
  for (const PrevalenceCell& c : cells) {
    nlohmann::ordered_json cell;
    cell["language"] = to_code(c.language);
    cell["property"] = to_code(c.property);
    cell["n_images"] = c.result.n_images;
    cell["expectation"] = c.result.value;
    j["cells"].push_back(std::move(cell));
  }
  return j.dump(1) + "\n";
}

std::vector<PrevalenceCell> prevalence_from_json(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    std::vector<PrevalenceCell> cells;
    for (const auto& c : j.at("cells")) {
      PrevalenceCell cell;
      cell.language = language_from_code(c.at("language").get<std::string>());
      cell.property = property_from_code(c.at("property").get<std::string>());
      cell.result = {std::string(to_code(cell.language)), c.at("n_images").get<std::size_t>(),
                     c.at("expectation").get<double>()};
      cells.push_back(std::move(cell));
    }
    return cells;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("malformed prevalence table ({})", e.what()));
  }
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

std::vector<std::filesystem::path> report_tables(const std::filesystem::path& results_dir,
                                                 const std::filesystem::path& out_dir) {
  const auto prevalence_path = results_dir / "prevalence.json";
  if (!std::filesystem::is_regular_file(prevalence_path)) {
    throw Error(fmt::format("missing results artifact: '{}'", prevalence_path.string()));
  }
  const auto cv_files = files_with_extension(results_dir / "cv", ".json");
  const auto agreement_files = files_with_extension(results_dir / "agreement", ".csv");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  // Prevalence by language and property.
  {
    std::vector<PrevalenceCell> cells;
    try {
      cells = prevalence_from_json(slurp(prevalence_path));
    } catch (const FormatError& e) {
      throw FormatError(fmt::format("{}: {}", prevalence_path.string(), e.what()));
    }
    std::map<Language, std::map<Property, double>> grid;
    for (const PrevalenceCell& c : cells) grid[c.language][c.property] = c.result.value;
    const auto path = out_dir / "table2_prevalence.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    out << "language" << property_header() << '\n';
    for (const auto& [lang, row] : grid) {
      out << display_name(lang);
      for (Property p : kAllProperties) {
        out << ',';
        if (auto it = row.find(p); it != row.end()) out << fmt::format("{:.4f}", it->second);
      }
      out << '\n';
    }
    written.push_back(path);
  }

  // Cross-validation accuracy, multilingual and per language.
  {
    CvTable multilingual;
    CvTable monolingual;
    for (const auto& file : cv_files) {
      CvResult r;
      try {
        r = cv_result_from_json(slurp(file));
      } catch (const Error& e) {
        throw FormatError(fmt::format("{}: {}", file.string(), e.what()));
      }
      if (r.scope.languages.size() == 1) {
        put_cell(monolingual,
                 {std::string(display_name(*r.scope.languages.begin())), r.pretraining_tag}, r,
                 file);
      } else {
        put_cell(multilingual, {std::string(), r.pretraining_tag}, r, file);
      }
    }
    write_cv_table(multilingual, false, out_dir / "table3_multilingual.csv", written);
    write_cv_table(monolingual, true, out_dir / "table4_monolingual.csv", written);
  }

  // Cross-lingual agreement.
  {
    std::map<std::string, std::map<Property, std::string>> grid;
    std::vector<std::string> pair_order;
    for (const auto& file : agreement_files) {
      std::istringstream in(slurp(file));
      std::string line;
      std::getline(in, line);
      const auto header = split_csv_line(line);
      const auto col = [&](std::string_view name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
          throw FormatError(fmt::format("{}: missing column '{}'", file.string(), name));
        }
        return static_cast<std::size_t>(it - header.begin());
      };
      const std::size_t c_pair = col("pair");
      const std::size_t c_prop = col("property");
      const std::size_t c_r = col("r");
      std::size_t line_no = 1;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != header.size()) {
          throw FormatError(fmt::format("{}: wrong field count", file.string()), line_no);
        }
        if (!grid.count(f[c_pair])) pair_order.push_back(f[c_pair]);
        grid[f[c_pair]][property_from_code(f[c_prop])] = f[c_r];
      }
    }
    const auto path = out_dir / "table5_agreement.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    out << "pair" << property_header() << '\n';
    std::sort(pair_order.begin(), pair_order.end());
    for (const auto& pair : pair_order) {
      out << csv_field(pair);
      for (Property p : kAllProperties) {
        out << ',';
        if (auto it = grid[pair].find(p); it != grid[pair].end()) out << it->second;
      }
      out << '\n';
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace caplens
