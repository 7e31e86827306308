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
#include <optional>
#include <stdexcept>
#include <string>

namespace caplens {

// Base for every error caused by user data or arguments. Anything else
// escaping the library is an internal error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line or the byte offset when
// the format has one.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::optional<std::size_t> line = {},
              std::optional<std::uint64_t> offset = {});

  std::optional<std::size_t> line() const { return line_; }
  std::optional<std::uint64_t> offset() const { return offset_; }

 private:
  std::optional<std::size_t> line_;
  std::optional<std::uint64_t> offset_;
};

// Well-formed input that breaks a data-model invariant (duplicate ids,
// dangling references, non-finite values, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedLanguage : public Error {
 public:
  using Error::Error;
};

// Data that cannot produce a meaningful result, e.g. one class empty after
// binarization.
class DegenerateData : public Error {
 public:
  using Error::Error;
};

}  // namespace caplens
