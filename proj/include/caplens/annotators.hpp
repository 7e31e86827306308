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

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "caplens/conllu.hpp"
#include "caplens/corpus.hpp"
#include "caplens/lexicons.hpp"
#include "caplens/types.hpp"

namespace caplens {

enum class Outcome { Positive, Negative, Filtered };

std::string_view to_code(Outcome outcome);
Outcome outcome_from_code(std::string_view code);

// Result of f_p on one caption. `detail` holds the matched lexeme, the
// numeral values or the filter reason; it is always set for positives.
struct PropertyLabel {
  std::string caption_id;
  Property property = Property::Num;
  Outcome outcome = Outcome::Negative;
  std::optional<std::string> detail;

  bool operator==(const PropertyLabel&) const = default;
};

// Filter reasons.
namespace reason {
inline constexpr std::string_view kNoParse = "no-parse";
inline constexpr std::string_view kUnsupportedLanguage = "unsupported-language";
inline constexpr std::string_view kRootCount = "root-count";
inline constexpr std::string_view kRootPos = "root-upos";
inline constexpr std::string_view kNonVerbRoot = "non-verb-root";
inline constexpr std::string_view kCopularRoot = "copular-root";
}  // namespace reason

struct NumeralLabel {
  PropertyLabel label;
  std::vector<long long> values;  // recognized values >= 2
};

// The individual annotators throw UnsupportedLanguage for languages they
// have no rules for; annotate_corpus turns that into a filtered label.
NumeralLabel annotate_numeral(const CaptionRecord& caption,
                              const Lexicons& lex = Lexicons::builtin());
PropertyLabel annotate_quantifier(const CaptionRecord& caption,
                                  const Lexicons& lex = Lexicons::builtin());
PropertyLabel annotate_negation(const CaptionRecord& caption, const DepSentence* parse,
                                const Lexicons& lex = Lexicons::builtin());
PropertyLabel annotate_root_pos(const CaptionRecord& caption, const DepSentence* parse);
PropertyLabel annotate_transitivity(const CaptionRecord& caption, const DepSentence* parse);
PropertyLabel annotate_passive(const CaptionRecord& caption, const DepSentence* parse,
                               const Lexicons& lex = Lexicons::builtin());

// Dispatches to the annotator for `property`; unsupported (property,
// language) pairs become filtered labels.
PropertyLabel annotate(const CaptionRecord& caption, Property property, const DepSentence* parse,
                       const Lexicons& lex = Lexicons::builtin());

// Labels for one property, sorted by caption_id.
class AnnotatedCorpus {
 public:
  AnnotatedCorpus() = default;
  AnnotatedCorpus(Property property, std::vector<PropertyLabel> labels);

  Property property() const { return property_; }
  const std::vector<PropertyLabel>& labels() const { return labels_; }
  const PropertyLabel* find(std::string_view caption_id) const;

  std::size_t count(Outcome outcome) const;
  double filtered_fraction() const;

 private:
  Property property_ = Property::Num;
  std::vector<PropertyLabel> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Labels every caption of the corpus. `jobs` = 0 uses the hardware
// concurrency; the output does not depend on it.
AnnotatedCorpus annotate_corpus(const Corpus& corpus, const ParseIndex* parses, Property property,
                                unsigned jobs = 0, const Lexicons& lex = Lexicons::builtin());

// Label JSONL: {"caption_id", "property", "outcome", "detail"}.
void write_labels(const AnnotatedCorpus& labels, std::ostream& out);
AnnotatedCorpus read_labels(std::istream& in);
AnnotatedCorpus load_labels(const std::filesystem::path& path);

}  // namespace caplens
