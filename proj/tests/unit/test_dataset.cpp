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

#include <doctest.h>

#include <algorithm>
#include <set>

#include "caplens/dataset.hpp"
#include "caplens/error.hpp"

using namespace caplens;

namespace {

std::vector<PropertyProbability> probs(std::initializer_list<double> values) {
  std::vector<PropertyProbability> out;
  int i = 0;
  for (double v : values) {
    out.push_back({"img:" + std::to_string(i++), Property::Num, CaptionScope::all(), 5, 0, v});
  }
  return out;
}

std::vector<LabeledImage> labeled(std::size_t pos, std::size_t neg) {
  std::vector<LabeledImage> out;
  for (std::size_t i = 0; i < pos; ++i) out.push_back({"p:" + std::to_string(i), true, 0.9});
  for (std::size_t i = 0; i < neg; ++i) out.push_back({"n:" + std::to_string(i), false, 0.1});
  return out;
}

std::set<std::string> positive_ids(const std::vector<LabeledImage>& items) {
  std::set<std::string> out;
  for (const auto& it : items) {
    if (it.label) out.insert(it.image_id);
  }
  return out;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("binarize at the median") {
    auto r = binarize(probs({0.0, 0.2, 0.4, 0.6, 0.8}));
    CHECK(r.threshold == 0.4);
    CHECK(positive_ids(r.labels) == std::set<std::string>{"img:3", "img:4"});
    r = binarize(probs({0, 0, 0, 0, 0.2, 0.4}));
    CHECK(r.threshold == 0.0);
    CHECK(positive_ids(r.labels) == std::set<std::string>{"img:4", "img:5"});
    CHECK_THROWS_AS(binarize(probs({0.5, 0.5, 0.5})), DegenerateData);
  }

  TEST_CASE("binarize does not depend on input order") {
    auto forward = probs({0.3, 0.1, 0.9, 0.5, 0.7, 0.2});
    auto backward = forward;
    std::reverse(backward.begin(), backward.end());
    CHECK(binarize(forward).labels == binarize(backward).labels);
  }

  TEST_CASE("balance down-samples the majority class") {
    const auto ds = balance(labeled(10, 4), 7);
    CHECK(ds.positives() == 4);
    CHECK(ds.negatives() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      const std::string id = "n:" + std::to_string(i);
      CHECK(std::any_of(ds.items.begin(), ds.items.end(),
                        [&](const LabeledImage& it) { return it.image_id == id; }));
    }
    CHECK(std::is_sorted(ds.items.begin(), ds.items.end(),
                         [](const auto& a, const auto& b) { return a.image_id < b.image_id; }));
    CHECK(balance(labeled(10, 4), 7) == ds);
    CHECK_THROWS_AS(balance(labeled(3, 0), 7), DegenerateData);
  }

  TEST_CASE("balanced input is kept whole") {
    auto input = labeled(5, 5);
    const auto ds = balance(input, 1);
    std::sort(input.begin(), input.end(),
              [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
    CHECK(ds.items == input);
  }

  TEST_CASE("build_dataset records the threshold") {
    const auto ds = build_dataset(probs({0, 0, 0, 0, 0.2, 0.4}), 3);
    CHECK(ds.threshold == 0.0);
    CHECK(ds.positives() == 2);
    CHECK(ds.negatives() == 2);
    CHECK(ds.seed == 3);
  }

  TEST_CASE("kfold stratifies each class") {
    const auto items = labeled(5, 5);
    const auto split = kfold(items, 5, 42);
    std::vector<int> pos(5);
    std::vector<int> neg(5);
    for (std::size_t i = 0; i < items.size(); ++i) {
      (items[i].label ? pos : neg)[static_cast<std::size_t>(split.fold_of[i])]++;
    }
    CHECK(pos == std::vector<int>(5, 1));
    CHECK(neg == std::vector<int>(5, 1));
    CHECK(split.assignments.size() == items.size());
  }

  TEST_CASE("kfold is deterministic and covers every item once") {
    const auto items = labeled(37, 37);
    const auto a = kfold(items, 5, 9);
    const auto b = kfold(items, 5, 9);
    CHECK(a.fold_of == b.fold_of);
    CHECK(a.assignments == b.assignments);
    CHECK(kfold(items, 5, 10).fold_of != a.fold_of);
    for (int f = 0; f < 5; ++f) {
      int p = 0;
      int n = 0;
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (a.fold_of[i] == f) (items[i].label ? p : n)++;
      }
      CHECK(std::abs(p - n) <= 1);
    }
  }

  TEST_CASE("kfold fold sizes differ by at most one") {
    auto sizes = kfold(labeled(6, 5), 5, 1).fold_sizes();
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    CHECK(sizes == std::vector<std::size_t>{3, 2, 2, 2, 2});
    CHECK_THROWS_AS(kfold(labeled(2, 2), 5, 1), DegenerateData);
    CHECK_THROWS_AS(kfold(labeled(5, 5), 1, 1), Error);
  }

  TEST_CASE("dataset JSON round-trip") {
    auto ds = build_dataset(probs({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}), 17);
    ds.property = Property::Tran;
    ds.scope = {{Language::De, Language::En}, Origin::Original};
    const std::string json = dataset_to_json(ds);
    CHECK(dataset_from_json(json) == ds);
    CHECK(dataset_to_json(dataset_from_json(json)) == json);
    CHECK_THROWS_AS(dataset_from_json("{\"property\": 3"), FormatError);
  }

  TEST_CASE("lower median") {
    CHECK(lower_median({3, 1, 2}) == 2);
    CHECK(lower_median({4, 1, 3, 2}) == 2);
  }
}
