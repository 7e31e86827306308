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

#include "caplens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "caplens/error.hpp"

namespace caplens {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

std::optional<PropertyProbability> property_probability(std::string image_id, Property property,
                                                        const CaptionScope& scope,
                                                        std::span<const PropertyLabel> labels) {
  PropertyProbability p{std::move(image_id), property, scope};
  for (const PropertyLabel& l : labels) {
    if (l.outcome == Outcome::Filtered) continue;
    ++p.n_captions;
    if (l.outcome == Outcome::Positive) ++p.n_positive;
  }
  if (p.n_captions == 0) return std::nullopt;
  p.value = static_cast<double>(p.n_positive) / static_cast<double>(p.n_captions);
  return p;
}

std::vector<PropertyProbability> image_probabilities(const Corpus& corpus,
                                                     const AnnotatedCorpus& labels,
                                                     const CaptionScope& scope) {
  std::vector<PropertyProbability> out;
  std::vector<PropertyLabel> in_scope;
  for (const ImageRecord& image : corpus.images()) {
    in_scope.clear();
    for (std::size_t idx : corpus.captions_of(image.image_id)) {
      const CaptionRecord& c = corpus.captions()[idx];
      if (!scope.contains(c.language, c.origin)) continue;
      if (const PropertyLabel* l = labels.find(c.caption_id)) in_scope.push_back(*l);
    }
    if (auto p = property_probability(image.image_id, labels.property(), scope, in_scope)) {
      out.push_back(std::move(*p));
    }
  }
  std::sort(out.begin(), out.end(), [](const PropertyProbability& a, const PropertyProbability& b) {
    return a.image_id < b.image_id;
  });
  return out;
}

std::optional<ExpectationResult> expectation(std::span<const PropertyProbability> probabilities,
                                             std::string group_key) {
  if (probabilities.empty()) return std::nullopt;
  CompensatedSum sum;
  for (const PropertyProbability& p : probabilities) sum.add(p.value);
  return ExpectationResult{std::move(group_key), probabilities.size(),
                           sum.value() / static_cast<double>(probabilities.size())};
}

std::vector<PrevalenceCell> prevalence_table(const Corpus& corpus,
                                             std::span<const AnnotatedCorpus> annotations) {
  std::vector<PrevalenceCell> cells;
  for (Language lang : kAllLanguages) {
    if (!corpus.languages().count(lang)) continue;
    for (Property prop : kAllProperties) {
      if (!is_supported(prop, lang)) continue;
      for (const AnnotatedCorpus& labels : annotations) {
        if (labels.property() != prop) continue;
        const auto probs = image_probabilities(corpus, labels, CaptionScope::only(lang));
        if (auto e = expectation(probs, std::string(to_code(lang)))) {
          cells.push_back({lang, prop, std::move(*e)});
        }
        break;
      }
    }
  }
  return cells;
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: lists differ in length");
  if (xs.size() < 2) throw std::invalid_argument("pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  const double mx = compensated_sum(xs) / n;
  const double my = compensated_sum(ys) / n;
  CompensatedSum sxy, sxx, syy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy.add(dx * dy);
    sxx.add(dx * dx);
    syy.add(dy * dy);
  }
  if (sxx.value() <= 0.0 || syy.value() <= 0.0) return std::nullopt;
  const double r = sxy.value() / std::sqrt(sxx.value() * syy.value());
  return std::clamp(r, -1.0, 1.0);
}

void write_probabilities(std::span<const PropertyProbability> probabilities, std::ostream& out) {
  for (const PropertyProbability& p : probabilities) {
    nlohmann::ordered_json j;
    j["image_id"] = p.image_id;
    j["property"] = to_code(p.property);
    j["scope"] = to_string(p.scope);
    j["n_captions"] = p.n_captions;
    j["n_positive"] = p.n_positive;
    j["value"] = p.value;
    out << j.dump() << '\n';
  }
}

std::vector<PropertyProbability> read_probabilities(std::istream& in) {
  std::vector<PropertyProbability> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(raw);
      PropertyProbability p;
      p.image_id = j.at("image_id").get<std::string>();
      p.property = property_from_code(j.at("property").get<std::string>());
      p.scope = scope_from_string(j.at("scope").get<std::string>());
      p.n_captions = j.at("n_captions").get<std::size_t>();
      p.n_positive = j.at("n_positive").get<std::size_t>();
      p.value = j.at("value").get<double>();
      if (p.n_captions == 0 || p.n_positive > p.n_captions) {
        throw FormatError("inconsistent caption counts", line_no);
      }
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(fmt::format("malformed probability record ({})", e.what()), line_no);
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  return out;
}

}  // namespace caplens
