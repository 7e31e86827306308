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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "caplens/stats.hpp"
#include "caplens/svm.hpp"

namespace caplens {

// prevalence.json: {"cells": [{"language", "property", "n_images", "expectation"}]}.
std::string prevalence_to_json(std::span<const PrevalenceCell> cells);
std::vector<PrevalenceCell> prevalence_from_json(std::string_view json_text);

// Reads a results directory holding
//   prevalence.json
//   cv/*.json          cross-validation results
//   agreement/*.csv    agreement rows
// and writes into `out_dir`
//   table2_prevalence.csv    language x property expectations
//   table3_multilingual.csv  pretraining x property, multilingual scopes
//   table4_monolingual.csv   (language, pretraining) x property
//   table5_agreement.csv     pair x property Pearson r
// Throws Error naming the first missing artifact. Returns the written paths.
std::vector<std::filesystem::path> report_tables(const std::filesystem::path& results_dir,
                                                 const std::filesystem::path& out_dir);

// Splits one CSV record, honouring double quotes.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace caplens
