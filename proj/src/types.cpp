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

#include "caplens/types.hpp"

#include <fmt/format.h>

#include "caplens/error.hpp"

namespace caplens {

std::string_view to_code(Language lang) {
  switch (lang) {
    case Language::En: return "en";
    case Language::De: return "de";
    case Language::Zh: return "zh";
    case Language::Jp: return "ja";
  }
  return "?";
}

Language language_from_code(std::string_view code) {
  if (code == "en") return Language::En;
  if (code == "de") return Language::De;
  if (code == "zh") return Language::Zh;
  if (code == "ja" || code == "jp") return Language::Jp;
  throw UnsupportedLanguage(fmt::format("unknown language code '{}'", code));
}

std::string_view to_code(Origin origin) {
  return origin == Origin::Original ? "original" : "translated";
}

Origin origin_from_code(std::string_view code) {
  if (code == "original") return Origin::Original;
  if (code == "translated") return Origin::Translated;
  throw Error(fmt::format("unknown origin '{}'", code));
}

std::string_view to_code(Property property) {
  switch (property) {
    case Property::Num: return "num";
    case Property::Quant: return "quant";
    case Property::Neg: return "neg";
    case Property::Pass: return "pass";
    case Property::Tran: return "tran";
    case Property::Verb: return "verb";
  }
  return "?";
}

Property property_from_code(std::string_view code) {
  for (Property p : kAllProperties) {
    if (to_code(p) == code) return p;
  }
  throw Error(fmt::format("unknown property '{}'", code));
}

std::string_view display_name(Property property) {
  switch (property) {
    case Property::Num: return "Num";
    case Property::Quant: return "Quant";
    case Property::Neg: return "Neg";
    case Property::Pass: return "Pass";
    case Property::Tran: return "Tran";
    case Property::Verb: return "Verb";
  }
  return "?";
}

std::string_view display_name(Language lang) {
  switch (lang) {
    case Language::En: return "En";
    case Language::De: return "De";
    case Language::Zh: return "Zh";
    case Language::Jp: return "Jp";
  }
  return "?";
}

bool is_supported(Property property, Language lang) {
  switch (property) {
    case Property::Num:
      return true;
    case Property::Quant:
      return lang != Language::De;
    case Property::Neg:
    case Property::Pass:
    case Property::Tran:
    case Property::Verb:
      return lang != Language::Jp;
  }
  return false;
}

std::string to_string(const CaptionScope& scope) {
  std::string out;
  if (scope.languages.empty()) {
    out = "all";
  } else {
    for (Language l : scope.languages) {
      if (!out.empty()) out += '+';
      out += to_code(l);
    }
  }
  if (scope.origin) {
    out += '/';
    out += to_code(*scope.origin);
  }
  return out;
}

CaptionScope scope_from_string(std::string_view text) {
  CaptionScope scope;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    scope.origin = origin_from_code(text.substr(slash + 1));
    text = text.substr(0, slash);
  }
  if (text == "all" || text == "mul") return scope;
  while (!text.empty()) {
    auto sep = text.find_first_of("+,");
    scope.languages.insert(language_from_code(text.substr(0, sep)));
    if (sep == std::string_view::npos) break;
    text.remove_prefix(sep + 1);
  }
  return scope;
}

}  // namespace caplens
