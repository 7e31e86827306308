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

#include "caplens/error.hpp"

#include <fmt/format.h>

namespace caplens {

namespace {

std::string located(const std::string& what, std::optional<std::size_t> line,
                    std::optional<std::uint64_t> offset) {
  if (line) return fmt::format("line {}: {}", *line, what);
  if (offset) return fmt::format("byte offset {}: {}", *offset, what);
  return what;
}

}  // namespace

FormatError::FormatError(const std::string& what, std::optional<std::size_t> line,
                         std::optional<std::uint64_t> offset)
    : Error(located(what, line, offset)), line_(line), offset_(offset) {}

}  // namespace caplens
