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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "caplens/corpus.hpp"
#include "caplens/stats.hpp"

namespace caplens {

struct ClassExpectation {
  std::string class_name;
  std::size_t n_images = 0;  // |S_c| after the singleton filter
  double expectation = 0.0;
};

struct ClassAnalysisOptions {
  // Only images from these datasets; empty keeps every annotated image.
  std::set<std::string> datasets;
};

// Per class c, the mean P over images with at least two boxes of c and a
// probability. Sorted by expectation descending, then class name. Throws
// DegenerateData when no image carries object annotations.
std::vector<ClassExpectation> class_expectations(const Corpus& corpus,
                                                 std::span<const PropertyProbability> num,
                                                 const ClassAnalysisOptions& options = {});

// The first and last `n` entries of a ranked list.
std::pair<std::vector<ClassExpectation>, std::vector<ClassExpectation>> top_bottom(
    std::span<const ClassExpectation> ranked, std::size_t n = 5);

struct CountCurvePoint {
  int k = 0;
  std::size_t n_images = 0;  // |S_k|
  double e_num = 0.0;
  std::optional<double> e_quant;  // nullopt when no quant probabilities
  std::size_t n_quant = 0;
};

struct CountCurve {
  std::size_t min_bucket = 100;
  std::map<int, std::size_t> bucket_sizes;  // every k, before filtering
  std::vector<CountCurvePoint> points;      // |S_k| >= min_bucket, ascending k
  std::optional<int> peak;                  // argmax e_num, ties to smaller k
  std::size_t crowd_boxes = 0;              // counted like any other box
};

// S_k holds the annotated images with a numeral probability and exactly k
// boxes of any class.
CountCurve count_curve(const Corpus& corpus, std::span<const PropertyProbability> num,
                       std::optional<std::span<const PropertyProbability>> quant = std::nullopt,
                       std::size_t min_bucket = 100);

// Pearson r between two per-image probability lists, over the images
// present in both. Throws DegenerateData with fewer than two shared images.
CorrelationResult agreement(std::span<const PropertyProbability> first,
                            std::span<const PropertyProbability> second, std::string label);

// Agreement between two languages over images captioned in both.
CorrelationResult crosslingual_agreement(const Corpus& corpus, const AnnotatedCorpus& labels,
                                         Language first, Language second);

struct TranslatedAgreement {
  CorrelationResult english_translated;   // En vs L_T
  CorrelationResult original_translated;  // L_O vs L_T
};

// Both correlations over the images that have all three probabilities.
TranslatedAgreement translated_agreement(std::span<const PropertyProbability> original,
                                         std::span<const PropertyProbability> translated,
                                         std::span<const PropertyProbability> english,
                                         Language language);
TranslatedAgreement translated_agreement(const Corpus& corpus, const AnnotatedCorpus& labels,
                                         Language language);

// Plot-ready CSV.
void write_class_csv(std::span<const ClassExpectation> ranked, std::ostream& out);
void write_curve_csv(const CountCurve& curve, std::ostream& out);
void write_correlation_csv(std::span<const CorrelationResult> results, std::ostream& out);

// RFC 4180 field quoting.
std::string csv_field(std::string_view value);

}  // namespace caplens
