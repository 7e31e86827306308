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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace caplens {

struct InputDigest {
  std::string path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

// Provenance record written next to every output.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::map<std::string, std::uint64_t> seeds;
  std::vector<InputDigest> inputs;
  std::vector<std::string> outputs;
  std::string version;
  std::string started_at;
  std::string finished_at;
};

// Hex SHA-256 of a file, or of every regular file under a directory in
// path order (name and content).
std::string sha256_path(const std::filesystem::path& path);

// ISO-8601 UTC, second resolution.
std::string utc_timestamp();

std::string tool_version();

// "<out>.manifest.json" for a file output, "<out>/manifest.json" for a
// directory output.
std::filesystem::path manifest_path_for(const std::filesystem::path& output);

nlohmann::ordered_json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace caplens
