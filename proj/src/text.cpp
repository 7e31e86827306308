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

#include "caplens/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "caplens/error.hpp"

namespace caplens::text {

bool is_valid_utf8(std::string_view utf8) {
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

namespace {

icu::UnicodeString decode(std::string_view utf8) {
  if (!is_valid_utf8(utf8)) throw FormatError("invalid UTF-8 text");
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
}

std::string encode(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

}  // namespace

std::string nfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
  const icu::UnicodeString input = decode(utf8);
  if (normalizer->isNormalized(input, status) && U_SUCCESS(status)) {
    return std::string(utf8);
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString out = normalizer->normalize(input, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalization failed");
  return encode(out);
}

std::string lower(std::string_view utf8) {
  icu::UnicodeString s = decode(utf8);
  s.toLower(icu::Locale::getRoot());
  return encode(s);
}

std::u32string to_u32(std::string_view utf8) {
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  std::u32string out;
  out.reserve(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) throw FormatError("invalid UTF-8 text");
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string to_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size() * 3);
  for (char32_t c : text) {
    uint8_t buf[4];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, 4, static_cast<UChar32>(c), error);
    if (error) throw FormatError("invalid code point");
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
  }
  return out;
}

std::string normalize_apostrophes(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for (std::size_t i = 0; i < utf8.size(); ++i) {
    // U+2018 / U+2019 are E2 80 98 / E2 80 99; U+02BC is CA BC.
    if (i + 2 < utf8.size() && static_cast<unsigned char>(utf8[i]) == 0xE2 &&
        static_cast<unsigned char>(utf8[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(utf8[i + 2]) == 0x98 ||
         static_cast<unsigned char>(utf8[i + 2]) == 0x99)) {
      out += '\'';
      i += 2;
    } else if (i + 1 < utf8.size() && static_cast<unsigned char>(utf8[i]) == 0xCA &&
               static_cast<unsigned char>(utf8[i + 1]) == 0xBC) {
      out += '\'';
      i += 1;
    } else {
      out += utf8[i];
    }
  }
  return out;
}

bool is_cjk_ideograph(char32_t c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
         (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x20000 && c <= 0x2FA1F) ||
         c == 0x3005;  // 々
}

bool is_kana(char32_t c) {
  return (c >= 0x3040 && c <= 0x30FF) || (c >= 0x31F0 && c <= 0x31FF) ||
         (c >= 0xFF66 && c <= 0xFF9F);
}

}  // namespace caplens::text
