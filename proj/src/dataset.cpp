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

#include "caplens/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "caplens/error.hpp"
#include "caplens/rng.hpp"

namespace caplens {

namespace {

bool by_id(const LabeledImage& a, const LabeledImage& b) { return a.image_id < b.image_id; }

void check_unique(std::span<const LabeledImage> sorted) {
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].image_id == sorted[i - 1].image_id) {
      throw ValidationError(fmt::format("duplicate image_id '{}'", sorted[i].image_id));
    }
  }
}

}  // namespace

double lower_median(std::vector<double> values) {
  if (values.empty()) throw DegenerateData("median of an empty list");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

BinarizeResult binarize(std::span<const PropertyProbability> probabilities) {
  std::vector<double> values;
  values.reserve(probabilities.size());
  for (const auto& p : probabilities) values.push_back(p.value);
  if (values.empty()) throw DegenerateData("binarize: no images");
  BinarizeResult out;
  out.threshold = lower_median(values);
  out.labels.reserve(probabilities.size());
  std::size_t positives = 0;
  for (const auto& p : probabilities) {
    const bool label = p.value > out.threshold;
    positives += label ? 1 : 0;
    out.labels.push_back({p.image_id, label, p.value});
  }
  std::sort(out.labels.begin(), out.labels.end(), by_id);
  check_unique(out.labels);
  if (positives == 0 || positives == out.labels.size()) {
    throw DegenerateData(fmt::format(
        "binarize: every image falls on one side of the median {} ({} images)", out.threshold,
        out.labels.size()));
  }
  return out;
}

std::size_t ClassificationDataset::positives() const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const LabeledImage& l) { return l.label; }));
}

ClassificationDataset balance(std::span<const LabeledImage> labels, std::uint64_t seed) {
  std::vector<LabeledImage> pos;
  std::vector<LabeledImage> neg;
  for (const LabeledImage& l : labels) (l.label ? pos : neg).push_back(l);
  if (pos.empty() || neg.empty()) {
    throw DegenerateData(fmt::format("balance: empty class ({} positive, {} negative)",
                                     pos.size(), neg.size()));
  }
  std::sort(pos.begin(), pos.end(), by_id);
  std::sort(neg.begin(), neg.end(), by_id);
  check_unique(pos);
  check_unique(neg);
  std::vector<LabeledImage>& majority = pos.size() > neg.size() ? pos : neg;
  std::vector<LabeledImage>& minority = pos.size() > neg.size() ? neg : pos;
  const std::size_t keep = minority.size();
  // Partial Fisher-Yates: the first `keep` slots are a uniform sample.
  Rng rng(seed);
  for (std::size_t i = 0; i < keep && keep < majority.size(); ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(majority.size() - i));
    std::swap(majority[i], majority[j]);
  }
  majority.resize(keep);

  ClassificationDataset ds;
  ds.seed = seed;
  ds.items = std::move(minority);
  ds.items.insert(ds.items.end(), majority.begin(), majority.end());
  std::sort(ds.items.begin(), ds.items.end(), by_id);
  check_unique(ds.items);
  return ds;
}

ClassificationDataset build_dataset(std::span<const PropertyProbability> probabilities,
                                    std::uint64_t seed) {
  const BinarizeResult bin = binarize(probabilities);
  ClassificationDataset ds = balance(bin.labels, seed);
  ds.property = probabilities.front().property;
  ds.scope = probabilities.front().scope;
  ds.threshold = bin.threshold;
  return ds;
}

std::vector<std::size_t> FoldSplit::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int f : fold_of) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

FoldSplit kfold(std::span<const LabeledImage> items, int k, std::uint64_t seed) {
  if (k < 2) throw Error(fmt::format("kfold: k must be at least 2, got {}", k));
  if (items.size() < static_cast<std::size_t>(k)) {
    throw DegenerateData(fmt::format("kfold: {} items cannot fill {} folds", items.size(), k));
  }
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return items[a].image_id < items[b].image_id; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (items[order[i]].image_id == items[order[i - 1]].image_id) {
      throw ValidationError(fmt::format("duplicate image_id '{}'", items[order[i]].image_id));
    }
  }
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i : order) (items[i].label ? pos : neg).push_back(i);

  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(pos));
  rng.shuffle(std::span<std::size_t>(neg));

  FoldSplit split;
  split.k = k;
  split.fold_of.assign(items.size(), 0);
  std::size_t slot = 0;
  for (const auto* group : {&pos, &neg}) {
    for (std::size_t i : *group) {
      const int fold = static_cast<int>(slot++ % static_cast<std::size_t>(k));
      split.fold_of[i] = fold;
      split.assignments.emplace(items[i].image_id, fold);
    }
  }
  return split;
}

std::string dataset_to_json(const ClassificationDataset& ds) {
  nlohmann::ordered_json j;
  j["property"] = to_code(ds.property);
  j["scope"] = to_string(ds.scope);
  j["threshold"] = ds.threshold;
  j["seed"] = ds.seed;
  j["n_positive"] = ds.positives();
  j["n_negative"] = ds.negatives();
  auto items = nlohmann::ordered_json::array();
  for (const LabeledImage& l : ds.items) {
    nlohmann::ordered_json item;
    item["image_id"] = l.image_id;
    item["label"] = l.label;
    item["probability"] = l.probability;
    items.push_back(std::move(item));
  }
  j["items"] = std::move(items);
  return j.dump(1) + "\n";
}

ClassificationDataset dataset_from_json(std::string_view json_text) {
  ClassificationDataset ds;
  try {
    const auto j = nlohmann::json::parse(json_text);
    ds.property = property_from_code(j.at("property").get<std::string>());
    ds.scope = scope_from_string(j.at("scope").get<std::string>());
    ds.threshold = j.at("threshold").get<double>();
    ds.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& item : j.at("items")) {
      ds.items.push_back({item.at("image_id").get<std::string>(), item.at("label").get<bool>(),
                          item.at("probability").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("malformed dataset manifest ({})", e.what()));
  }
  std::sort(ds.items.begin(), ds.items.end(), by_id);
  check_unique(ds.items);
  if (ds.positives() != ds.negatives()) {
    throw ValidationError(fmt::format("dataset is not balanced ({} positive, {} negative)",
                                      ds.positives(), ds.negatives()));
  }
  return ds;
}

void save_dataset(const ClassificationDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write dataset '{}'", path.string()));
  out << dataset_to_json(dataset);
}

ClassificationDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open dataset '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return dataset_from_json(buf.str());
}

}  // namespace caplens
