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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "caplens/stats.hpp"

namespace caplens {

struct LabeledImage {
  std::string image_id;
  bool label = false;
  double probability = 0.0;

  bool operator==(const LabeledImage&) const = default;
};

struct BinarizeResult {
  double threshold = 0.0;
  std::vector<LabeledImage> labels;  // sorted by image_id
};

// Lower median: the order statistic at (n - 1) / 2.
double lower_median(std::vector<double> values);

// Positive iff P(I) > lower median. Throws DegenerateData when a class
// would be empty.
BinarizeResult binarize(std::span<const PropertyProbability> probabilities);

struct ClassificationDataset {
  Property property = Property::Num;
  CaptionScope scope;
  double threshold = 0.0;
  std::uint64_t seed = 0;
  std::vector<LabeledImage> items;  // sorted by image_id, |pos| == |neg|

  std::size_t positives() const;
  std::size_t negatives() const { return items.size() - positives(); }
  bool operator==(const ClassificationDataset&) const = default;
};

// Down-samples the majority class uniformly without replacement. Every
// minority item is kept.
ClassificationDataset balance(std::span<const LabeledImage> labels, std::uint64_t seed);

// binarize + balance, with the metadata filled in.
ClassificationDataset build_dataset(std::span<const PropertyProbability> probabilities,
                                    std::uint64_t seed);

struct FoldSplit {
  int k = 5;
  std::vector<int> fold_of;  // aligned with the items the split was built from
  std::map<std::string, int> assignments;

  std::vector<std::size_t> fold_sizes() const;
};

// Stratified: within each class, a seeded shuffle then round-robin, the
// negatives continuing where the positives stopped.
FoldSplit kfold(std::span<const LabeledImage> items, int k, std::uint64_t seed);
inline FoldSplit kfold(const ClassificationDataset& dataset, int k, std::uint64_t seed) {
  return kfold(dataset.items, k, seed);
}

// Dataset manifest JSON.
std::string dataset_to_json(const ClassificationDataset& dataset);
ClassificationDataset dataset_from_json(std::string_view json_text);
void save_dataset(const ClassificationDataset& dataset, const std::filesystem::path& path);
ClassificationDataset load_dataset(const std::filesystem::path& path);

}  // namespace caplens
