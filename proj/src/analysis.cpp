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

#include "caplens/analysis.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>

#include "caplens/error.hpp"

namespace caplens {

namespace {

using ProbabilityIndex = std::unordered_map<std::string_view, const PropertyProbability*>;

ProbabilityIndex index_of(std::span<const PropertyProbability> probabilities) {
  ProbabilityIndex index;
  for (const PropertyProbability& p : probabilities) {
    if (!index.emplace(p.image_id, &p).second) {
      throw ValidationError(fmt::format("image '{}' has two probabilities", p.image_id));
    }
  }
  return index;
}

std::string format_value(double v) { return fmt::format("{:.6f}", v); }

}  // namespace

std::vector<ClassExpectation> class_expectations(const Corpus& corpus,
                                                 std::span<const PropertyProbability> num,
                                                 const ClassAnalysisOptions& options) {
  const ProbabilityIndex probs = index_of(num);
  struct Acc {
    std::size_t n = 0;
    CompensatedSum sum;
  };
  std::map<std::string, Acc> by_class;
  bool any_annotated = false;
  for (const ImageRecord& image : corpus.images()) {
    if (!image.objects) continue;
    if (!options.datasets.empty() && !options.datasets.count(image.dataset)) continue;
    any_annotated = true;
    const auto it = probs.find(image.image_id);
    if (it == probs.end()) continue;
    std::map<std::string_view, std::size_t> counts;
    for (const ObjectAnnotation& obj : *image.objects) ++counts[obj.class_name];
    for (const auto& [name, count] : counts) {
      if (count < 2) continue;
      Acc& acc = by_class[std::string(name)];
      ++acc.n;
      acc.sum.add(it->second->value);
    }
  }
  if (!any_annotated) throw DegenerateData("no image carries object annotations");
  std::vector<ClassExpectation> out;
  for (const auto& [name, acc] : by_class) {
    out.push_back({name, acc.n, acc.sum.value() / static_cast<double>(acc.n)});
  }
  std::sort(out.begin(), out.end(), [](const ClassExpectation& a, const ClassExpectation& b) {
    if (a.expectation != b.expectation) return a.expectation > b.expectation;
    return a.class_name < b.class_name;
  });
  return out;
}

std::pair<std::vector<ClassExpectation>, std::vector<ClassExpectation>> top_bottom(
    std::span<const ClassExpectation> ranked, std::size_t n) {
  const std::size_t m = std::min(n, ranked.size());
  return {{ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(m)},
          {ranked.end() - static_cast<std::ptrdiff_t>(m), ranked.end()}};
}

CountCurve count_curve(const Corpus& corpus, std::span<const PropertyProbability> num,
                       std::optional<std::span<const PropertyProbability>> quant,
                       std::size_t min_bucket) {
  const ProbabilityIndex num_index = index_of(num);
  ProbabilityIndex quant_index;
  if (quant) quant_index = index_of(*quant);

  struct Bucket {
    std::size_t n = 0;
    CompensatedSum num;
    std::size_t n_quant = 0;
    CompensatedSum quant;
  };
  std::map<int, Bucket> buckets;
  CountCurve curve;
  curve.min_bucket = min_bucket;
  for (const ImageRecord& image : corpus.images()) {
    if (!image.objects) continue;
    const auto it = num_index.find(image.image_id);
    if (it == num_index.end()) continue;
    const int k = static_cast<int>(image.objects->size());
    for (const ObjectAnnotation& obj : *image.objects) curve.crowd_boxes += obj.crowd ? 1 : 0;
    Bucket& b = buckets[k];
    ++b.n;
    b.num.add(it->second->value);
    if (const auto q = quant_index.find(image.image_id); q != quant_index.end()) {
      ++b.n_quant;
      b.quant.add(q->second->value);
    }
  }
  for (const auto& [k, b] : buckets) {
    curve.bucket_sizes[k] = b.n;
    if (b.n < min_bucket) continue;
    CountCurvePoint point{k, b.n, b.num.value() / static_cast<double>(b.n), std::nullopt,
                          b.n_quant};
    if (b.n_quant > 0) point.e_quant = b.quant.value() / static_cast<double>(b.n_quant);
    curve.points.push_back(point);
  }
  // Ascending k with a strict comparison keeps the smaller k on ties.
  const CountCurvePoint* best = nullptr;
  for (const CountCurvePoint& p : curve.points) {
    if (best == nullptr || p.e_num > best->e_num) best = &p;
  }
  if (best != nullptr) curve.peak = best->k;
  return curve;
}

CorrelationResult agreement(std::span<const PropertyProbability> first,
                            std::span<const PropertyProbability> second, std::string label) {
  const ProbabilityIndex second_index = index_of(second);
  index_of(first);
  std::vector<const PropertyProbability*> a;
  std::vector<const PropertyProbability*> b;
  for (const PropertyProbability& p : first) {
    if (const auto it = second_index.find(p.image_id); it != second_index.end()) {
      a.push_back(&p);
      b.push_back(it->second);
    }
  }
  // Order by image id so the result does not depend on input order.
  std::vector<std::size_t> order(a.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a[x]->image_id < a[y]->image_id; });
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i : order) {
    xs.push_back(a[i]->value);
    ys.push_back(b[i]->value);
  }
  if (xs.size() < 2) {
    throw DegenerateData(
        fmt::format("agreement {} needs at least two shared images, found {}", label, xs.size()));
  }
  CorrelationResult result;
  if (!first.empty()) result.property = first.front().property;
  result.n_images = xs.size();
  result.r = pearson(xs, ys);
  result.label = std::move(label);
  return result;
}

CorrelationResult crosslingual_agreement(const Corpus& corpus, const AnnotatedCorpus& labels,
                                         Language first, Language second) {
  const auto aligned = align_multilingual(corpus, {first, second});
  std::set<std::string_view> shared;
  for (const AlignedImage& image : aligned) shared.insert(image.image_id);
  auto restrict = [&](Language lang) {
    auto probs = image_probabilities(corpus, labels, CaptionScope::only(lang));
    std::erase_if(probs, [&](const PropertyProbability& p) { return !shared.count(p.image_id); });
    return probs;
  };
  CorrelationResult r = agreement(restrict(first), restrict(second),
                                  fmt::format("{}/{}", display_name(first), display_name(second)));
  r.first = first;
  r.second = second;
  r.property = labels.property();
  return r;
}

TranslatedAgreement translated_agreement(std::span<const PropertyProbability> original,
                                         std::span<const PropertyProbability> translated,
                                         std::span<const PropertyProbability> english,
                                         Language language) {
  const ProbabilityIndex o = index_of(original);
  const ProbabilityIndex e = index_of(english);
  std::vector<PropertyProbability> t;
  for (const PropertyProbability& p : translated) {
    if (o.count(p.image_id) && e.count(p.image_id)) t.push_back(p);
  }
  if (t.empty()) throw DegenerateData("translated agreement: no image has all three probabilities");
  const std::string code(display_name(language));
  TranslatedAgreement out{
      agreement(english, t, fmt::format("En-{}_T", code)),
      agreement(original, t, fmt::format("{}_O-{}_T", code, code)),
  };
  out.english_translated.first = Language::En;
  out.english_translated.second = language;
  out.original_translated.first = language;
  out.original_translated.second = language;
  return out;
}

TranslatedAgreement translated_agreement(const Corpus& corpus, const AnnotatedCorpus& labels,
                                         Language language) {
  CaptionScope original{{language}, Origin::Original};
  CaptionScope translated{{language}, Origin::Translated};
  const auto o = image_probabilities(corpus, labels, original);
  const auto t = image_probabilities(corpus, labels, translated);
  const auto e = image_probabilities(corpus, labels, CaptionScope::only(Language::En));
  TranslatedAgreement out = translated_agreement(o, t, e, language);
  out.english_translated.property = labels.property();
  out.original_translated.property = labels.property();
  return out;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_class_csv(std::span<const ClassExpectation> ranked, std::ostream& out) {
  out << "rank,class,n_images,expectation\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    out << (i + 1) << ',' << csv_field(ranked[i].class_name) << ',' << ranked[i].n_images << ','
        << format_value(ranked[i].expectation) << '\n';
  }
}

void write_curve_csv(const CountCurve& curve, std::ostream& out) {
  out << "k,n_images,e_num,e_quant,is_peak\n";
  for (const CountCurvePoint& p : curve.points) {
    out << p.k << ',' << p.n_images << ',' << format_value(p.e_num) << ','
        << (p.e_quant ? format_value(*p.e_quant) : std::string()) << ','
        << (curve.peak == p.k ? 1 : 0) << '\n';
  }
}

void write_correlation_csv(std::span<const CorrelationResult> results, std::ostream& out) {
  out << "pair,first,second,property,n_images,r\n";
  for (const CorrelationResult& r : results) {
    out << csv_field(r.label) << ',' << to_code(r.first) << ',' << to_code(r.second) << ','
        << to_code(r.property) << ',' << r.n_images << ','
        << (r.r ? format_value(*r.r) : std::string()) << '\n';
  }
}

}  // namespace caplens
