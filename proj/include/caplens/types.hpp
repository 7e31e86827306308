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

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace caplens {

enum class Language { En, De, Zh, Jp };
enum class Origin { Original, Translated };

// Num and Quant are lexical; Tran and Verb filter captions they cannot judge.
enum class Property { Num, Quant, Neg, Pass, Tran, Verb };

inline constexpr std::array<Language, 4> kAllLanguages = {
    Language::En, Language::De, Language::Zh, Language::Jp};
inline constexpr std::array<Property, 6> kAllProperties = {
    Property::Num, Property::Quant, Property::Neg,
    Property::Pass, Property::Tran, Property::Verb};

// Wire codes: "en", "de", "zh", "ja".
std::string_view to_code(Language lang);
Language language_from_code(std::string_view code);

std::string_view to_code(Origin origin);
Origin origin_from_code(std::string_view code);

// Wire codes: "num", "quant", "neg", "pass", "tran", "verb".
std::string_view to_code(Property property);
Property property_from_code(std::string_view code);

// Display names as used in the result tables ("Num", "Pass", ...).
std::string_view display_name(Property property);
std::string_view display_name(Language lang);

// Whether an annotator exists for the (property, language) pair.
bool is_supported(Property property, Language lang);

// A subset of captions of an image: by language (empty = all languages) and
// optionally by origin.
struct CaptionScope {
  std::set<Language> languages;
  std::optional<Origin> origin;

  bool contains(Language lang, Origin o) const {
    return (languages.empty() || languages.count(lang) > 0) &&
           (!origin || *origin == o);
  }
  bool operator==(const CaptionScope&) const = default;

  static CaptionScope all() { return {}; }
  static CaptionScope only(Language lang) { return {{lang}, std::nullopt}; }
};

// "all", "en", "de+zh", optionally suffixed "/original" or "/translated".
std::string to_string(const CaptionScope& scope);
CaptionScope scope_from_string(std::string_view text);

}  // namespace caplens
