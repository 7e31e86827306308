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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "caplens/corpus.hpp"

namespace caplens {

struct DepToken {
  int index = 0;  // 1-based
  std::string form;
  std::string lemma;
  std::string upos;
  std::string xpos;
  int head = 0;  // 0 = root
  std::string deprel;

  bool operator==(const DepToken&) const = default;
};

// One dependency tree. Several roots are allowed (parsers produce them and
// the annotators must be able to filter such captions).
struct DepSentence {
  std::string caption_id;
  std::vector<DepToken> tokens;

  const DepToken& token(int index) const { return tokens.at(static_cast<std::size_t>(index - 1)); }
  bool operator==(const DepSentence&) const = default;
};

// Checks contiguous 1..n indices, in-range heads and acyclicity.
void validate(const DepSentence& sentence);

// CoNLL-U v2 reader. Each sentence block must carry "# caption_id = <id>".
// Multiword ranges and empty nodes are skipped; fields are kept verbatim
// ("_" stays "_").
std::vector<DepSentence> parse_conllu(std::istream& in);
std::vector<DepSentence> parse_conllu(std::string_view text);

// Writes one block per sentence with FEATS/DEPS/MISC as "_".
void write_conllu(std::span<const DepSentence> sentences, std::ostream& out);
std::string to_conllu(const DepSentence& sentence);

std::vector<DepToken> roots(const DepSentence& sentence);

// Relation match honoring the UD v1/v2 aliases {obj, dobj},
// {aux:pass, auxpass} and {nsubj:pass, nsubjpass}.
bool deprel_matches(std::string_view deprel, std::string_view filter);

// Children of `index`, optionally restricted to relations matching
// `deprel_filter`. Throws std::out_of_range for a bad index.
std::vector<DepToken> children(const DepSentence& sentence, int index,
                               std::optional<std::string_view> deprel_filter = {});

struct ParseIndex {
  std::unordered_map<std::string, DepSentence> by_caption;
  std::size_t provided = 0;
  std::size_t unknown = 0;     // caption ids absent from the corpus
  std::size_t duplicates = 0;  // repeated ids; the last one wins
  double coverage = 0.0;       // attached / corpus captions

  const DepSentence* find(std::string_view caption_id) const;
};

ParseIndex attach_parses(const Corpus& corpus, std::vector<DepSentence> sentences);

}  // namespace caplens
