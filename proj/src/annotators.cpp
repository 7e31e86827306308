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

#include "caplens/annotators.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "caplens/error.hpp"
#include "caplens/numerals.hpp"
#include "caplens/text.hpp"

namespace caplens {

std::string_view to_code(Outcome outcome) {
  switch (outcome) {
    case Outcome::Positive: return "positive";
    case Outcome::Negative: return "negative";
    case Outcome::Filtered: return "filtered";
  }
  return "?";
}

Outcome outcome_from_code(std::string_view code) {
  if (code == "positive") return Outcome::Positive;
  if (code == "negative") return Outcome::Negative;
  if (code == "filtered") return Outcome::Filtered;
  throw Error(fmt::format("unknown outcome '{}'", code));
}

namespace {

PropertyLabel make(const CaptionRecord& c, Property p, Outcome o,
                   std::optional<std::string> detail = std::nullopt) {
  return PropertyLabel{c.caption_id, p, o, std::move(detail)};
}

PropertyLabel filtered(const CaptionRecord& c, Property p, std::string_view why) {
  return make(c, p, Outcome::Filtered, std::string(why));
}

[[noreturn]] void unsupported(const CaptionRecord& c, Property p) {
  throw UnsupportedLanguage(fmt::format("no {} annotator for language '{}'", to_code(p),
                                        to_code(c.language)));
}

bool is_word_char(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') ||
         c == U'\'' || (c >= 0xC0 && c <= 0x24F && c != 0xD7 && c != 0xF7);
}

// Lowercased words with typographic apostrophes folded and outer quotes
// stripped.
std::vector<std::string> english_words(std::string_view utf8) {
  const std::u32string t = text::to_u32(text::lower(text::normalize_apostrophes(utf8)));
  std::vector<std::string> words;
  for (std::size_t i = 0; i < t.size();) {
    if (!is_word_char(t[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < t.size() && is_word_char(t[j])) ++j;
    std::size_t b = i;
    std::size_t e = j;
    while (b < e && t[b] == U'\'') ++b;
    while (e > b && t[e - 1] == U'\'') --e;
    if (b < e) words.push_back(text::to_utf8(t.substr(b, e - b)));
    i = j;
  }
  return words;
}

std::vector<std::string> split_spaces(std::string_view phrase) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < phrase.size()) {
    const auto j = phrase.find(' ', i);
    if (j != i) out.emplace_back(phrase.substr(i, j == std::string_view::npos ? j : j - i));
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return out;
}

// Earliest phrase occurrence over a word sequence; longest on ties.
std::optional<std::string> match_phrase(const std::vector<std::string>& words,
                                        const std::vector<std::string>& phrases) {
  std::optional<std::string> best;
  std::size_t best_pos = words.size();
  std::size_t best_len = 0;
  for (const std::string& phrase : phrases) {
    const auto parts = split_spaces(phrase);
    if (parts.empty() || parts.size() > words.size()) continue;
    for (std::size_t i = 0; i + parts.size() <= words.size() && i <= best_pos; ++i) {
      if (!std::equal(parts.begin(), parts.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) {
        continue;
      }
      if (i < best_pos || parts.size() > best_len) {
        best = phrase;
        best_pos = i;
        best_len = parts.size();
      }
      break;
    }
  }
  return best;
}

std::optional<std::string> match_substring(std::string_view text,
                                           const std::vector<std::string>& entries) {
  std::optional<std::string> best;
  std::size_t best_pos = std::string_view::npos;
  for (const std::string& e : entries) {
    const auto pos = text.find(e);
    if (pos == std::string_view::npos) continue;
    if (!best || pos < best_pos || (pos == best_pos && e.size() > best->size())) {
      best = e;
      best_pos = pos;
    }
  }
  return best;
}

// Code points covered by any occurrence of an exclusion word.
std::vector<bool> covered_by(const std::u32string& t, const std::vector<std::string>& words) {
  std::vector<bool> mask(t.size(), false);
  for (const std::string& w : words) {
    const std::u32string u = text::to_u32(w);
    if (u.empty()) continue;
    for (auto pos = t.find(u); pos != std::u32string::npos; pos = t.find(u, pos + 1)) {
      for (std::size_t k = pos; k < pos + u.size(); ++k) mask[k] = true;
    }
  }
  return mask;
}

std::string lemma_of(const DepToken& tok) {
  const std::string& base = (tok.lemma.empty() || tok.lemma == "_") ? tok.form : tok.lemma;
  return text::lower(base);
}

bool is_copula(Language lang, std::string_view lemma) {
  switch (lang) {
    case Language::En: return lemma == "be";
    case Language::De: return lemma == "sein";
    case Language::Zh: return lemma == "有";
    case Language::Jp: return false;
  }
  return false;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// Shared single-root gate of the tree annotators. Returns the root or sets
// `out` to a filtered label.
const DepToken* single_root(const CaptionRecord& c, Property p, const DepSentence* parse,
                            std::optional<PropertyLabel>& out) {
  if (parse == nullptr) {
    out = filtered(c, p, reason::kNoParse);
    return nullptr;
  }
  const DepToken* root = nullptr;
  int count = 0;
  for (const DepToken& t : parse->tokens) {
    if (t.head == 0) {
      ++count;
      root = &t;
    }
  }
  if (count != 1) {
    out = make(c, p, Outcome::Filtered, fmt::format("{}:{}", reason::kRootCount, count));
    return nullptr;
  }
  return root;
}

}  // namespace

NumeralLabel annotate_numeral(const CaptionRecord& caption, const Lexicons& lex) {
  NumeralLabel out;
  for (const NumeralMatch& m : recognize_numerals(caption.text, caption.language, lex)) {
    if (m.value >= 2) out.values.push_back(m.value);
  }
  if (out.values.empty()) {
    out.label = make(caption, Property::Num, Outcome::Negative);
  } else {
    out.label = make(caption, Property::Num, Outcome::Positive,
                     fmt::format("{}", fmt::join(out.values, ",")));
  }
  return out;
}

PropertyLabel annotate_quantifier(const CaptionRecord& caption, const Lexicons& lex) {
  std::optional<std::string> hit;
  switch (caption.language) {
    case Language::En:
      hit = match_phrase(english_words(caption.text), lex.quantifiers_en);
      break;
    case Language::Zh:
      hit = match_substring(caption.text, lex.quantifiers_zh);
      break;
    case Language::Jp:
      hit = match_substring(caption.text, lex.quantifiers_ja);
      break;
    case Language::De:
      unsupported(caption, Property::Quant);
  }
  return hit ? make(caption, Property::Quant, Outcome::Positive, std::move(hit))
             : make(caption, Property::Quant, Outcome::Negative);
}

PropertyLabel annotate_negation(const CaptionRecord& caption, const DepSentence* parse,
                                const Lexicons& lex) {
  constexpr Property kProp = Property::Neg;
  switch (caption.language) {
    case Language::En: {
      const auto words = english_words(caption.text);
      for (const std::string& w : words) {
        if (std::find(lex.negation_en.begin(), lex.negation_en.end(), w) != lex.negation_en.end()) {
          return make(caption, kProp, Outcome::Positive, w);
        }
      }
      return make(caption, kProp, Outcome::Negative);
    }
    case Language::De: {
      if (parse == nullptr) return filtered(caption, kProp, reason::kNoParse);
      for (const DepToken& tok : parse->tokens) {
        const std::string lemma = lemma_of(tok);
        if (std::find(lex.negation_de.begin(), lex.negation_de.end(), lemma) !=
            lex.negation_de.end()) {
          return make(caption, kProp, Outcome::Positive, lemma);
        }
      }
      return make(caption, kProp, Outcome::Negative);
    }
    case Language::Zh: {
      const std::u32string t = text::to_u32(caption.text);
      const std::vector<bool> excluded = covered_by(t, lex.negation_exclusions_zh);
      std::vector<std::u32string> entries;
      for (const std::string& e : lex.negation_zh) entries.push_back(text::to_u32(e));
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (excluded[i]) continue;
        const std::u32string* longest = nullptr;
        for (const std::u32string& e : entries) {
          if (!e.empty() && t.compare(i, e.size(), e) == 0 &&
              (longest == nullptr || e.size() > longest->size())) {
            longest = &e;
          }
        }
        if (longest) return make(caption, kProp, Outcome::Positive, text::to_utf8(*longest));
      }
      return make(caption, kProp, Outcome::Negative);
    }
    case Language::Jp:
      break;
  }
  unsupported(caption, kProp);
}

PropertyLabel annotate_root_pos(const CaptionRecord& caption, const DepSentence* parse) {
  constexpr Property kProp = Property::Verb;
  if (caption.language == Language::Jp) unsupported(caption, kProp);
  std::optional<PropertyLabel> early;
  const DepToken* root = single_root(caption, kProp, parse, early);
  if (!root) return *early;
  const std::string lemma = lemma_of(*root);
  if (is_copula(caption.language, lemma)) {
    return make(caption, kProp, Outcome::Negative, "copula:" + lemma);
  }
  if (root->upos == "VERB") return make(caption, kProp, Outcome::Positive, lemma);
  if (root->upos == "NOUN" || root->upos == "PROPN") {
    return make(caption, kProp, Outcome::Negative, "nominal:" + lemma);
  }
  return make(caption, kProp, Outcome::Filtered, fmt::format("{}:{}", reason::kRootPos, root->upos));
}

PropertyLabel annotate_transitivity(const CaptionRecord& caption, const DepSentence* parse) {
  constexpr Property kProp = Property::Tran;
  if (caption.language == Language::Jp) unsupported(caption, kProp);
  std::optional<PropertyLabel> early;
  const DepToken* root = single_root(caption, kProp, parse, early);
  if (!root) return *early;
  const std::string lemma = lemma_of(*root);
  if (is_copula(caption.language, lemma)) {
    return make(caption, kProp, Outcome::Filtered, std::string(reason::kCopularRoot));
  }
  if (root->upos != "VERB") {
    return make(caption, kProp, Outcome::Filtered,
                fmt::format("{}:{}", reason::kNonVerbRoot, root->upos));
  }
  if (caption.language == Language::De) {
    for (const DepToken& child : children(*parse, root->index)) {
      if (child.xpos == "PTKVZ") {
        return make(caption, kProp, Outcome::Negative, "particle:" + lemma_of(child));
      }
    }
  }
  if (caption.language == Language::Zh) {
    if (ends_with(lemma, "在")) return make(caption, kProp, Outcome::Negative, "root-ends-zai");
    if (root->index < static_cast<int>(parse->tokens.size())) {
      const std::string next = lemma_of(parse->token(root->index + 1));
      if (next == "在") return make(caption, kProp, Outcome::Negative, "next-zai");
      if (starts_with(next, "向")) return make(caption, kProp, Outcome::Negative, "next-xiang");
    }
  }
  const auto objects = children(*parse, root->index, "obj");
  if (!objects.empty()) {
    return make(caption, kProp, Outcome::Positive, lemma + ">" + lemma_of(objects.front()));
  }
  return make(caption, kProp, Outcome::Negative);
}

PropertyLabel annotate_passive(const CaptionRecord& caption, const DepSentence* parse,
                               const Lexicons& lex) {
  constexpr Property kProp = Property::Pass;
  switch (caption.language) {
    case Language::En:
    case Language::De:
      if (parse == nullptr) return filtered(caption, kProp, reason::kNoParse);
      for (const DepToken& tok : parse->tokens) {
        if (deprel_matches(tok.deprel, "aux:pass") || deprel_matches(tok.deprel, "nsubj:pass")) {
          return make(caption, kProp, Outcome::Positive, tok.deprel + ":" + tok.form);
        }
      }
      return make(caption, kProp, Outcome::Negative);
    case Language::Zh: {
      const std::u32string t = text::to_u32(caption.text);
      const std::vector<bool> excluded = covered_by(t, lex.passive_exclusions_zh);
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == U'被' && !excluded[i]) {
          return make(caption, kProp, Outcome::Positive, "被");
        }
      }
      return make(caption, kProp, Outcome::Negative);
    }
    case Language::Jp:
      break;
  }
  unsupported(caption, kProp);
}

PropertyLabel annotate(const CaptionRecord& caption, Property property, const DepSentence* parse,
                       const Lexicons& lex) {
  if (!is_supported(property, caption.language)) {
    return filtered(caption, property, reason::kUnsupportedLanguage);
  }
  switch (property) {
    case Property::Num: return annotate_numeral(caption, lex).label;
    case Property::Quant: return annotate_quantifier(caption, lex);
    case Property::Neg: return annotate_negation(caption, parse, lex);
    case Property::Pass: return annotate_passive(caption, parse, lex);
    case Property::Tran: return annotate_transitivity(caption, parse);
    case Property::Verb: return annotate_root_pos(caption, parse);
  }
  throw std::logic_error("unhandled property");
}

// ---------------------------------------------------------------------------

AnnotatedCorpus::AnnotatedCorpus(Property property, std::vector<PropertyLabel> labels)
    : property_(property), labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end(),
            [](const PropertyLabel& a, const PropertyLabel& b) { return a.caption_id < b.caption_id; });
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const PropertyLabel& l = labels_[i];
    if (l.property != property_) {
      throw ValidationError(fmt::format("label for '{}' has property {}, expected {}",
                                        l.caption_id, to_code(l.property), to_code(property_)));
    }
    if (l.outcome == Outcome::Positive && !l.detail) {
      throw ValidationError(fmt::format("positive label '{}' without detail", l.caption_id));
    }
    if (!index_.emplace(l.caption_id, i).second) {
      throw ValidationError(fmt::format("duplicate label for caption '{}'", l.caption_id));
    }
  }
}

const PropertyLabel* AnnotatedCorpus::find(std::string_view caption_id) const {
  auto it = index_.find(std::string(caption_id));
  return it == index_.end() ? nullptr : &labels_[it->second];
}

std::size_t AnnotatedCorpus::count(Outcome outcome) const {
  return static_cast<std::size_t>(std::count_if(
      labels_.begin(), labels_.end(), [&](const PropertyLabel& l) { return l.outcome == outcome; }));
}

double AnnotatedCorpus::filtered_fraction() const {
  return labels_.empty() ? 0.0
                         : static_cast<double>(count(Outcome::Filtered)) /
                               static_cast<double>(labels_.size());
}

AnnotatedCorpus annotate_corpus(const Corpus& corpus, const ParseIndex* parses, Property property,
                                unsigned jobs, const Lexicons& lex) {
  const auto captions = corpus.captions();
  std::vector<PropertyLabel> labels(captions.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const CaptionRecord& c = captions[i];
      const DepSentence* parse = parses ? parses->find(c.caption_id) : nullptr;
      labels[i] = annotate(c, property, parse, lex);
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n = captions.size();
  const std::size_t workers = std::min<std::size_t>(jobs, std::max<std::size_t>(1, n / 256));
  if (workers <= 1) {
    work(0, n);
  } else {
    // Exceptions here are logic errors; annotate() never throws on data.
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }
  return AnnotatedCorpus(property, std::move(labels));
}

void write_labels(const AnnotatedCorpus& labels, std::ostream& out) {
  for (const PropertyLabel& l : labels.labels()) {
    nlohmann::ordered_json j;
    j["caption_id"] = l.caption_id;
    j["property"] = to_code(l.property);
    j["outcome"] = to_code(l.outcome);
    j["detail"] = l.detail ? nlohmann::ordered_json(*l.detail) : nlohmann::ordered_json(nullptr);
    out << j.dump() << '\n';
  }
}

AnnotatedCorpus read_labels(std::istream& in) {
  std::vector<PropertyLabel> labels;
  std::optional<Property> property;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(raw);
      PropertyLabel l;
      l.caption_id = j.at("caption_id").get<std::string>();
      l.property = property_from_code(j.at("property").get<std::string>());
      l.outcome = outcome_from_code(j.at("outcome").get<std::string>());
      if (j.contains("detail") && !j.at("detail").is_null()) {
        l.detail = j.at("detail").get<std::string>();
      }
      if (property && *property != l.property) {
        throw FormatError("labels for more than one property in one file", line_no);
      }
      property = l.property;
      labels.push_back(std::move(l));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(fmt::format("malformed label record ({})", e.what()), line_no);
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  return AnnotatedCorpus(property.value_or(Property::Num), std::move(labels));
}

AnnotatedCorpus load_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open labels file '{}'", path.string()));
  return read_labels(in);
}

}  // namespace caplens
