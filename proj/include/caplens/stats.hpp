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
#include <vector>

#include "caplens/annotators.hpp"
#include "caplens/corpus.hpp"

namespace caplens {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> values);

// P_p(I): share of positive labels among the image's non-filtered captions
// in scope.
struct PropertyProbability {
  std::string image_id;
  Property property = Property::Num;
  CaptionScope scope;
  std::size_t n_captions = 0;  // countable (non-filtered) captions
  std::size_t n_positive = 0;
  double value = 0.0;

  bool operator==(const PropertyProbability&) const = default;
};

// `labels` are the labels of one image's in-scope captions. Returns nullopt
// when every label is filtered (the image carries no probability).
std::optional<PropertyProbability> property_probability(std::string image_id, Property property,
                                                        const CaptionScope& scope,
                                                        std::span<const PropertyLabel> labels);

// One probability per image with at least one countable in-scope caption,
// sorted by image_id.
std::vector<PropertyProbability> image_probabilities(const Corpus& corpus,
                                                     const AnnotatedCorpus& labels,
                                                     const CaptionScope& scope);

struct ExpectationResult {
  std::string group_key;
  std::size_t n_images = 0;
  double value = 0.0;
};

// Mean probability over the group; nullopt for an empty group.
std::optional<ExpectationResult> expectation(std::span<const PropertyProbability> probabilities,
                                             std::string group_key = "all");

struct PrevalenceCell {
  Language language = Language::En;
  Property property = Property::Num;
  ExpectationResult result;
};

// E[P_{p,L}] over the images having captions in L, for every annotated
// property and supported language present in the corpus.
std::vector<PrevalenceCell> prevalence_table(const Corpus& corpus,
                                             std::span<const AnnotatedCorpus> annotations);

// Sample Pearson correlation. Throws std::invalid_argument for unequal
// lengths or fewer than two points; nullopt when either list is constant.
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

struct CorrelationResult {
  Language first = Language::En;
  Language second = Language::En;
  Property property = Property::Num;
  std::size_t n_images = 0;
  std::optional<double> r;  // nullopt: undefined (constant list)
  std::string label;        // e.g. "De/En" or "En-De_T"
};

void write_probabilities(std::span<const PropertyProbability> probabilities, std::ostream& out);
std::vector<PropertyProbability> read_probabilities(std::istream& in);

}  // namespace caplens
