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

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "caplens/types.hpp"

namespace caplens {

struct ObjectAnnotation {
  std::string class_name;
  std::array<double, 4> bbox{};  // x, y, width, height in pixels
  bool crowd = false;            // COCO iscrowd flag, kept for provenance

  bool operator==(const ObjectAnnotation&) const = default;
};

struct ImageRecord {
  std::string image_id;  // "<source>:<original-id>"
  std::string dataset;
  // Absent when the source dataset has no object annotations; an empty
  // vector means "annotated, no objects".
  std::optional<std::vector<ObjectAnnotation>> objects;

  bool operator==(const ImageRecord&) const = default;
};

struct CaptionRecord {
  std::string caption_id;
  std::string image_id;
  Language language = Language::En;
  std::string text;  // NFC
  Origin origin = Origin::Original;

  bool operator==(const CaptionRecord&) const = default;
};

// An immutable multilingual image-caption corpus. Construction validates
// referential integrity and id uniqueness; records keep insertion order.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::string name, std::vector<ImageRecord> images,
         std::vector<CaptionRecord> captions);

  const std::string& name() const { return name_; }
  std::span<const ImageRecord> images() const { return images_; }
  std::span<const CaptionRecord> captions() const { return captions_; }
  const std::set<Language>& languages() const { return languages_; }

  const ImageRecord* find_image(std::string_view image_id) const;
  const CaptionRecord* find_caption(std::string_view caption_id) const;

  // Indices into captions() for one image, in insertion order.
  std::span<const std::size_t> captions_of(std::string_view image_id) const;

  bool operator==(const Corpus& other) const {
    return name_ == other.name_ && images_ == other.images_ &&
           captions_ == other.captions_;
  }

 private:
  std::string name_;
  std::vector<ImageRecord> images_;
  std::vector<CaptionRecord> captions_;
  std::set<Language> languages_;
  std::unordered_map<std::string, std::size_t> image_index_;
  std::unordered_map<std::string, std::size_t> caption_index_;
  std::vector<std::vector<std::size_t>> captions_by_image_;
};

// Canonical JSONL: one record per line, "kind" is "image" or "caption".
// Text is NFC-normalized on read.
Corpus read_canonical(std::istream& in, std::string name = "corpus");
Corpus load_canonical(const std::filesystem::path& path);

// Writes every image record, then every caption record, in corpus order.
void write_canonical(const Corpus& corpus, std::ostream& out);
void save_canonical(const Corpus& corpus, const std::filesystem::path& path);

struct CocoImportOptions {
  std::filesystem::path captions_json;
  std::optional<std::filesystem::path> instances_json;
  Language language = Language::En;
  std::string dataset_name;
  Origin origin = Origin::Original;
  // Shared image-pool namespace used for image ids; defaults to
  // dataset_name when empty.
  std::string image_source;
};

Corpus import_coco(const CocoImportOptions& options);

// Union of images (deduplicated by image_id) and captions. Conflicting
// object annotations keep the first-seen set and log a warning; identical
// duplicate captions collapse, differing ones with the same id throw.
Corpus merge(std::span<const Corpus> corpora);

struct AlignedImage {
  std::string image_id;
  std::map<Language, std::vector<std::string>> caption_ids;
};

// Images with at least one caption in every requested language, ordered by
// image_id.
std::vector<AlignedImage> align_multilingual(const Corpus& corpus,
                                             const std::set<Language>& languages);

}  // namespace caplens
