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

#include "caplens/embeddings.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "caplens/error.hpp"

namespace caplens {

static_assert(std::numeric_limits<float>::is_iec559, "IEEE-754 floats required");

namespace {

template <typename T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return v;
  }
}

template <typename T>
void put(std::ostream& out, T v) {
  v = byteswap_if_big(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint64_t offset() const { return offset_; }

  void bytes(char* dst, std::size_t n, std::string_view what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got != n) {
      throw FormatError(fmt::format("truncated {}: expected {} bytes, found {}", what, n, got),
                        std::nullopt, offset_ + got);
    }
    offset_ += n;
  }

  template <typename T>
  T get(std::string_view what) {
    T v;
    bytes(reinterpret_cast<char*>(&v), sizeof(T), what);
    return byteswap_if_big(v);
  }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
  std::uint64_t offset_ = 0;
};

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> ids, std::uint32_t dim,
                                 std::vector<float> values, std::string pretraining_tag)
    : ids_(std::move(ids)), dim_(dim), values_(std::move(values)), tag_(std::move(pretraining_tag)) {
  if (values_.size() != ids_.size() * dim_) {
    throw ValidationError(fmt::format("embedding matrix has {} values for {} rows of dim {}",
                                      values_.size(), ids_.size(), dim_));
  }
  if (tag_.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw ValidationError("pretraining tag too long");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValidationError(fmt::format("non-finite value in row '{}' column {}",
                                        ids_[i / dim_], i % dim_));
    }
  }
  order_.resize(ids_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(),
            [&](std::size_t a, std::size_t b) { return ids_[a] < ids_[b]; });
  for (std::size_t i = 1; i < order_.size(); ++i) {
    if (ids_[order_[i]] == ids_[order_[i - 1]]) {
      throw ValidationError(fmt::format("duplicate embedding id '{}'", ids_[order_[i]]));
    }
  }
  for (const auto& id : ids_) {
    if (id.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ValidationError("embedding id longer than 65535 bytes");
    }
  }
}

std::ptrdiff_t EmbeddingMatrix::find(std::string_view id) const {
  const auto it = std::lower_bound(order_.begin(), order_.end(), id,
                                   [&](std::size_t i, std::string_view v) { return ids_[i] < v; });
  if (it == order_.end() || ids_[*it] != id) return -1;
  return static_cast<std::ptrdiff_t>(*it);
}

std::size_t embedding_header_size(std::string_view tag) {
  return sizeof(kEmbeddingMagic) + sizeof(std::uint16_t) + sizeof(std::uint32_t) +
         sizeof(std::uint64_t) + sizeof(std::uint16_t) + tag.size();
}

EmbeddingMatrix read_embeddings(std::istream& in) {
  Reader r(in);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, kEmbeddingMagic, 4) != 0) {
    throw FormatError("not an embedding file (magic mismatch)", std::nullopt, 0);
  }
  const auto version = r.get<std::uint16_t>("version");
  if (version != kEmbeddingVersion) {
    throw FormatError(fmt::format("unsupported embedding format version {}", version),
                      std::nullopt, 4);
  }
  const auto dim = r.get<std::uint32_t>("dim");
  const auto count = r.get<std::uint64_t>("count");
  const auto tag_len = r.get<std::uint16_t>("tag length");
  std::string tag(tag_len, '\0');
  r.bytes(tag.data(), tag_len, "tag");

  std::vector<std::string> ids;
  std::vector<float> values;
  // Grow as records arrive so a corrupt count cannot force a huge allocation.
  for (std::uint64_t rec = 0; rec < count; ++rec) {
    const auto id_len = r.get<std::uint16_t>("record id length");
    std::string id(id_len, '\0');
    r.bytes(id.data(), id_len, "record id");
    for (std::uint32_t c = 0; c < dim; ++c) {
      const std::uint64_t at = r.offset();
      const float v = r.get<float>("record values");
      if (!std::isfinite(v)) {
        throw FormatError(fmt::format("non-finite value in record '{}' column {}", id, c),
                          std::nullopt, at);
      }
      values.push_back(v);
    }
    ids.push_back(std::move(id));
  }
  if (!r.at_end()) {
    throw FormatError(fmt::format("trailing bytes after {} records", count), std::nullopt,
                      r.offset());
  }
  try {
    return EmbeddingMatrix(std::move(ids), dim, std::move(values), std::move(tag));
  } catch (const ValidationError& e) {
    throw FormatError(e.what());
  }
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open embeddings '{}'", path.string()));
  try {
    return read_embeddings(in);
  } catch (const FormatError& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()), e.line(), e.offset());
  }
}

void write_embeddings(const EmbeddingMatrix& m, std::ostream& out) {
  out.write(kEmbeddingMagic, 4);
  put<std::uint16_t>(out, kEmbeddingVersion);
  put<std::uint32_t>(out, m.dim());
  put<std::uint64_t>(out, m.size());
  put<std::uint16_t>(out, static_cast<std::uint16_t>(m.pretraining_tag().size()));
  out.write(m.pretraining_tag().data(), static_cast<std::streamsize>(m.pretraining_tag().size()));
  std::vector<std::size_t> order(m.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return m.ids()[a] < m.ids()[b]; });
  for (std::size_t i : order) {
    const std::string& id = m.ids()[i];
    put<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (float v : m.row(i)) put<float>(out, v);
  }
  if (!out) throw Error("failed writing embeddings");
}

void save_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write embeddings '{}'", path.string()));
  write_embeddings(matrix, out);
}

JoinedFeatures join(const ClassificationDataset& dataset, const EmbeddingMatrix& matrix) {
  JoinedFeatures out;
  out.dim = matrix.dim();
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    const LabeledImage& item = dataset.items[i];
    const std::ptrdiff_t row = matrix.find(item.image_id);
    if (row < 0) {
      out.missing.push_back(item.image_id);
      continue;
    }
    for (float v : matrix.row(static_cast<std::size_t>(row))) out.X.push_back(v);
    out.y.push_back(item.label ? 1 : -1);
    out.image_ids.push_back(item.image_id);
    out.item_index.push_back(i);
  }
  return out;
}

}  // namespace caplens
