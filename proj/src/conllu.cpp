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

#include "caplens/conllu.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "caplens/error.hpp"

namespace caplens {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Returns an error message or an empty string.
std::string check(const DepSentence& sentence) {
  const int n = static_cast<int>(sentence.tokens.size());
  for (int i = 0; i < n; ++i) {
    const DepToken& tok = sentence.tokens[static_cast<std::size_t>(i)];
    if (tok.index != i + 1) {
      return fmt::format("non-contiguous token indices (expected {}, got {})", i + 1, tok.index);
    }
    if (tok.head < 0 || tok.head > n) {
      return fmt::format("token {} has head {} outside 0..{}", tok.index, tok.head, n);
    }
    if (tok.head == tok.index) return fmt::format("cyclic heads: token {} heads itself", tok.index);
  }
  // 0 = unvisited, 1 = on current path, 2 = reaches a root.
  std::vector<int> state(static_cast<std::size_t>(n) + 1, 0);
  for (int start = 1; start <= n; ++start) {
    std::vector<int> path;
    int cur = start;
    while (cur != 0 && state[static_cast<std::size_t>(cur)] == 0) {
      state[static_cast<std::size_t>(cur)] = 1;
      path.push_back(cur);
      cur = sentence.tokens[static_cast<std::size_t>(cur - 1)].head;
    }
    if (cur != 0 && state[static_cast<std::size_t>(cur)] == 1) {
      return fmt::format("cyclic heads through token {}", cur);
    }
    for (int p : path) state[static_cast<std::size_t>(p)] = 2;
  }
  return {};
}

}  // namespace

void validate(const DepSentence& sentence) {
  if (auto msg = check(sentence); !msg.empty()) {
    throw ValidationError(fmt::format("sentence '{}': {}", sentence.caption_id, msg));
  }
}

std::vector<DepSentence> parse_conllu(std::istream& in) {
  std::vector<DepSentence> out;
  DepSentence current;
  bool has_id = false;
  bool in_block = false;
  std::size_t block_line = 0;
  std::size_t line_no = 0;

  auto finish = [&]() {
    if (!in_block) return;
    if (!has_id) throw FormatError("sentence block without '# caption_id' comment", block_line);
    if (auto msg = check(current); !msg.empty()) throw FormatError(msg, block_line);
    out.push_back(std::move(current));
    current = DepSentence{};
    has_id = false;
    in_block = false;
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) {
      finish();
      continue;
    }
    if (!in_block) {
      in_block = true;
      block_line = line_no;
    }
    if (line.front() == '#') {
      std::string_view body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos && trim(body.substr(0, eq)) == "caption_id") {
        current.caption_id = std::string(trim(body.substr(eq + 1)));
        if (current.caption_id.empty()) throw FormatError("empty caption_id", line_no);
        has_id = true;
      }
      continue;
    }
    const auto fields = split_tabs(line);
    if (fields.size() < 8) {
      throw FormatError(fmt::format("expected 10 tab-separated columns, got {}", fields.size()),
                        line_no);
    }
    const std::string_view id = fields[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) {
      continue;  // multiword range or empty node
    }
    DepToken tok;
    const auto index = parse_int(id);
    const auto head = parse_int(fields[6]);
    if (!index || *index < 1) throw FormatError(fmt::format("bad token id '{}'", id), line_no);
    if (!head) throw FormatError(fmt::format("bad head '{}'", fields[6]), line_no);
    tok.index = *index;
    tok.form = std::string(fields[1]);
    tok.lemma = std::string(fields[2]);
    tok.upos = std::string(fields[3]);
    tok.xpos = std::string(fields[4]);
    tok.head = *head;
    tok.deprel = std::string(fields[7]);
    current.tokens.push_back(std::move(tok));
  }
  finish();
  return out;
}

std::vector<DepSentence> parse_conllu(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_conllu(in);
}

std::string to_conllu(const DepSentence& sentence) {
  std::string out = fmt::format("# caption_id = {}\n", sentence.caption_id);
  for (const DepToken& t : sentence.tokens) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t_\t{}\t{}\t_\t_\n", t.index, t.form, t.lemma, t.upos,
                       t.xpos, t.head, t.deprel);
  }
  out += '\n';
  return out;
}

void write_conllu(std::span<const DepSentence> sentences, std::ostream& out) {
  for (const DepSentence& s : sentences) out << to_conllu(s);
}

std::vector<DepToken> roots(const DepSentence& sentence) {
  std::vector<DepToken> out;
  for (const DepToken& t : sentence.tokens) {
    if (t.head == 0) out.push_back(t);
  }
  return out;
}

bool deprel_matches(std::string_view deprel, std::string_view filter) {
  if (deprel == filter) return true;
  static constexpr std::string_view kAliases[][2] = {
      {"obj", "dobj"}, {"aux:pass", "auxpass"}, {"nsubj:pass", "nsubjpass"}};
  for (const auto& group : kAliases) {
    const bool d = deprel == group[0] || deprel == group[1];
    const bool f = filter == group[0] || filter == group[1];
    if (d && f) return true;
  }
  return false;
}

std::vector<DepToken> children(const DepSentence& sentence, int index,
                               std::optional<std::string_view> deprel_filter) {
  if (index < 1 || index > static_cast<int>(sentence.tokens.size())) {
    throw std::out_of_range(fmt::format("token index {} out of range 1..{}", index,
                                        sentence.tokens.size()));
  }
  std::vector<DepToken> out;
  for (const DepToken& t : sentence.tokens) {
    if (t.head == index && (!deprel_filter || deprel_matches(t.deprel, *deprel_filter))) {
      out.push_back(t);
    }
  }
  return out;
}

const DepSentence* ParseIndex::find(std::string_view caption_id) const {
  auto it = by_caption.find(std::string(caption_id));
  return it == by_caption.end() ? nullptr : &it->second;
}

ParseIndex attach_parses(const Corpus& corpus, std::vector<DepSentence> sentences) {
  ParseIndex index;
  index.provided = sentences.size();
  for (DepSentence& s : sentences) {
    if (!corpus.find_caption(s.caption_id)) {
      ++index.unknown;
      continue;
    }
    auto [it, inserted] = index.by_caption.try_emplace(s.caption_id);
    if (!inserted) {
      ++index.duplicates;
      spdlog::warn("attach_parses: duplicate parse for '{}', keeping the last", s.caption_id);
    }
    it->second = std::move(s);
  }
  if (index.unknown > 0) {
    spdlog::warn("attach_parses: skipped {} parses with unknown caption ids", index.unknown);
  }
  const auto total = corpus.captions().size();
  index.coverage = total == 0 ? 0.0
                              : static_cast<double>(index.by_caption.size()) /
                                    static_cast<double>(total);
  return index;
}

}  // namespace caplens
