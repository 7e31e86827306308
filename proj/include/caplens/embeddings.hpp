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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "caplens/dataset.hpp"

namespace caplens {

inline constexpr char kEmbeddingMagic[4] = {'C', 'E', 'M', 'B'};
inline constexpr std::uint16_t kEmbeddingVersion = 1;

// n x d float matrix keyed by image_id, rows stored contiguously.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  // Validates: |ids| * dim == |values|, unique ids, finite entries.
  EmbeddingMatrix(std::vector<std::string> ids, std::uint32_t dim, std::vector<float> values,
                  std::string pretraining_tag = "none");

  std::size_t size() const { return ids_.size(); }
  std::uint32_t dim() const { return dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<float>& values() const { return values_; }
  const std::string& pretraining_tag() const { return tag_; }

  std::span<const float> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  // Row index of `id`, or -1.
  std::ptrdiff_t find(std::string_view id) const;

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::vector<std::string> ids_;
  std::uint32_t dim_ = 0;
  std::vector<float> values_;
  std::string tag_ = "none";
  std::vector<std::size_t> order_;  // row indices sorted by id
};

// Reads the binary container. Rows keep file order.
EmbeddingMatrix read_embeddings(std::istream& in);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

// Writes records in id-sorted order.
void write_embeddings(const EmbeddingMatrix& matrix, std::ostream& out);
void save_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path);

// Size of the fixed header for a given tag.
std::size_t embedding_header_size(std::string_view tag);

// Dense double rows aligned with the dataset items that have embeddings.
struct JoinedFeatures {
  std::size_t dim = 0;
  std::vector<double> X;              // row-major, |items| x dim
  std::vector<int> y;                 // +1 / -1
  std::vector<std::string> image_ids;
  std::vector<std::size_t> item_index;  // position in dataset.items
  std::vector<std::string> missing;   // dataset ids without a row

  std::size_t rows() const { return image_ids.size(); }
};

JoinedFeatures join(const ClassificationDataset& dataset, const EmbeddingMatrix& matrix);

}  // namespace caplens
