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

#include <string>
#include <string_view>

// UTF-8 helpers backed by ICU.
namespace caplens::text {

bool is_valid_utf8(std::string_view utf8);

// Canonical composition (NFC). Throws FormatError on invalid UTF-8.
std::string nfc(std::string_view utf8);

// Full Unicode lowercase in the root locale.
std::string lower(std::string_view utf8);

std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view text);

// Replaces typographic apostrophes (U+2019, U+2018, U+02BC) with '\''.
std::string normalize_apostrophes(std::string_view utf8);

bool is_cjk_ideograph(char32_t c);
bool is_kana(char32_t c);

}  // namespace caplens::text
