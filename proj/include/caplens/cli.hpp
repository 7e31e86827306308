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

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace caplens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

// Runs the command line `args` (without the program name). Returns 0 on
// success, 1 for bad arguments or input data, 2 for internal failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Runs `body` and maps escaping exceptions to exit codes: caplens::Error
// and filesystem failures to 1, any other exception to 2. The message goes
// to `err`.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace caplens::cli
