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

#include "caplens/manifest.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <memory>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "caplens/error.hpp"

#ifndef CAPLENS_VERSION
#define CAPLENS_VERSION "0.0.0"
#endif

namespace caplens {

namespace {

struct DigestDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 initialisation failed");
    }
  }

  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw std::runtime_error("SHA-256 update failed");
  }

  void update_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
      update(buf, static_cast<std::size_t>(in.gcount()));
    }
  }

  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw std::runtime_error("SHA-256 failed");
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, DigestDeleter> ctx_;
};

}  // namespace

std::string sha256_path(const std::filesystem::path& path) {
  Sha256 sha;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string rel = std::filesystem::relative(f, path).generic_string();
      sha.update(rel.data(), rel.size() + 1);  // include the NUL separator
      sha.update_file(f);
    }
  } else {
    sha.update_file(path);
  }
  return sha.hex();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

std::string tool_version() { return CAPLENS_VERSION; }

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  if (std::filesystem::is_directory(output)) return output / "manifest.json";
  std::filesystem::path p = output;
  p += ".manifest.json";
  return p;
}

nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config"] = m.config;
  j["seeds"] = nlohmann::ordered_json::object();
  for (const auto& [name, seed] : m.seeds) j["seeds"][name] = seed;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const InputDigest& d : m.inputs) {
    j["inputs"].push_back({{"path", d.path}, {"sha256", d.sha256}, {"bytes", d.bytes}});
  }
  j["outputs"] = m.outputs;
  j["version"] = m.version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config = nlohmann::ordered_json::parse(j.at("config").dump());
    for (const auto& [name, seed] : j.at("seeds").items()) m.seeds[name] = seed.get<std::uint64_t>();
    for (const auto& d : j.at("inputs")) {
      m.inputs.push_back({d.at("path").get<std::string>(), d.at("sha256").get<std::string>(),
                          d.at("bytes").get<std::uintmax_t>()});
    }
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.version = j.at("version").get<std::string>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("malformed manifest ({})", e.what()));
  }
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write manifest '{}'", path.string()));
  out << manifest_to_json(manifest).dump(1) << '\n';
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open manifest '{}'", path.string()));
  try {
    return manifest_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("malformed manifest '{}' ({})", path.string(), e.what()));
  }
}

}  // namespace caplens
