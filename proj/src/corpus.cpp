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

#include "caplens/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "caplens/error.hpp"
#include "caplens/text.hpp"

namespace caplens {

using nlohmann::json;
using nlohmann::ordered_json;

Corpus::Corpus(std::string name, std::vector<ImageRecord> images,
               std::vector<CaptionRecord> captions)
    : name_(std::move(name)), images_(std::move(images)), captions_(std::move(captions)) {
  image_index_.reserve(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const ImageRecord& image = images_[i];
    if (image.image_id.empty()) throw ValidationError("image with empty image_id");
    if (!image_index_.emplace(image.image_id, i).second) {
      throw ValidationError(fmt::format("duplicate image_id '{}'", image.image_id));
    }
    if (image.objects) {
      for (const ObjectAnnotation& obj : *image.objects) {
        if (obj.class_name.empty()) {
          throw ValidationError(
              fmt::format("image '{}': object with empty class name", image.image_id));
        }
        if (!(obj.bbox[2] > 0.0) || !(obj.bbox[3] > 0.0)) {
          throw ValidationError(fmt::format(
              "image '{}': object '{}' has non-positive bbox size", image.image_id,
              obj.class_name));
        }
      }
    }
  }
  captions_by_image_.resize(images_.size());
  caption_index_.reserve(captions_.size());
  for (std::size_t i = 0; i < captions_.size(); ++i) {
    const CaptionRecord& caption = captions_[i];
    if (caption.caption_id.empty()) throw ValidationError("caption with empty caption_id");
    if (caption.text.empty()) {
      throw ValidationError(fmt::format("caption '{}' has empty text", caption.caption_id));
    }
    if (!caption_index_.emplace(caption.caption_id, i).second) {
      throw ValidationError(fmt::format("duplicate caption_id '{}'", caption.caption_id));
    }
    auto it = image_index_.find(caption.image_id);
    if (it == image_index_.end()) {
      throw ValidationError(fmt::format("caption '{}' references unknown image_id '{}'",
                                        caption.caption_id, caption.image_id));
    }
    captions_by_image_[it->second].push_back(i);
    languages_.insert(caption.language);
  }
}

const ImageRecord* Corpus::find_image(std::string_view image_id) const {
  auto it = image_index_.find(std::string(image_id));
  return it == image_index_.end() ? nullptr : &images_[it->second];
}

const CaptionRecord* Corpus::find_caption(std::string_view caption_id) const {
  auto it = caption_index_.find(std::string(caption_id));
  return it == caption_index_.end() ? nullptr : &captions_[it->second];
}

std::span<const std::size_t> Corpus::captions_of(std::string_view image_id) const {
  auto it = image_index_.find(std::string(image_id));
  if (it == image_index_.end()) return {};
  return captions_by_image_[it->second];
}

// ---------------------------------------------------------------------------
// Canonical JSONL

namespace {

template <typename T>
T field(const json& record, const char* key, std::size_t line) {
  auto it = record.find(key);
  if (it == record.end()) throw FormatError(fmt::format("missing field '{}'", key), line);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FormatError(fmt::format("field '{}' has wrong type", key), line);
  }
}

ObjectAnnotation parse_object(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw FormatError("object entry is not a JSON object", line);
  ObjectAnnotation out;
  out.class_name = text::nfc(field<std::string>(obj, "class", line));
  const json& bbox = obj.contains("bbox") ? obj.at("bbox") : json();
  if (!bbox.is_array() || bbox.size() != 4) {
    throw FormatError("bbox must be an array of 4 numbers", line);
  }
  for (std::size_t k = 0; k < 4; ++k) {
    if (!bbox[k].is_number()) throw FormatError("bbox must be an array of 4 numbers", line);
    out.bbox[k] = bbox[k].get<double>();
  }
  if (auto it = obj.find("crowd"); it != obj.end()) {
    if (!it->is_boolean()) throw FormatError("field 'crowd' has wrong type", line);
    out.crowd = it->get<bool>();
  }
  return out;
}

}  // namespace

Corpus read_canonical(std::istream& in, std::string name) {
  std::vector<ImageRecord> images;
  std::vector<CaptionRecord> captions;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(" \t") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw FormatError(fmt::format("malformed JSON ({})", e.what()), line_no);
    }
    if (!record.is_object()) throw FormatError("record is not a JSON object", line_no);
    const auto kind = field<std::string>(record, "kind", line_no);
    try {
      if (kind == "image") {
        ImageRecord image;
        image.image_id = field<std::string>(record, "image_id", line_no);
        image.dataset = field<std::string>(record, "dataset", line_no);
        if (auto it = record.find("objects"); it != record.end() && !it->is_null()) {
          if (!it->is_array()) throw FormatError("'objects' must be an array", line_no);
          std::vector<ObjectAnnotation> objects;
          objects.reserve(it->size());
          for (const json& obj : *it) objects.push_back(parse_object(obj, line_no));
          image.objects = std::move(objects);
        }
        images.push_back(std::move(image));
      } else if (kind == "caption") {
        CaptionRecord caption;
        caption.caption_id = field<std::string>(record, "caption_id", line_no);
        caption.image_id = field<std::string>(record, "image_id", line_no);
        caption.language = language_from_code(field<std::string>(record, "lang", line_no));
        caption.text = text::nfc(field<std::string>(record, "text", line_no));
        caption.origin = record.contains("origin")
                             ? origin_from_code(field<std::string>(record, "origin", line_no))
                             : Origin::Original;
        captions.push_back(std::move(caption));
      } else {
        throw FormatError(fmt::format("unknown record kind '{}'", kind), line_no);
      }
    } catch (const FormatError&) {
      throw;
    } catch (const Error& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  return Corpus(std::move(name), std::move(images), std::move(captions));
}

Corpus load_canonical(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open corpus file '{}'", path.string()));
  return read_canonical(in, path.stem().string());
}

void write_canonical(const Corpus& corpus, std::ostream& out) {
  for (const ImageRecord& image : corpus.images()) {
    ordered_json record;
    record["kind"] = "image";
    record["image_id"] = image.image_id;
    record["dataset"] = image.dataset;
    if (image.objects) {
      ordered_json objects = ordered_json::array();
      for (const ObjectAnnotation& obj : *image.objects) {
        ordered_json o;
        o["class"] = obj.class_name;
        o["bbox"] = obj.bbox;
        if (obj.crowd) o["crowd"] = true;
        objects.push_back(std::move(o));
      }
      record["objects"] = std::move(objects);
    }
    out << record.dump() << '\n';
  }
  for (const CaptionRecord& caption : corpus.captions()) {
    ordered_json record;
    record["kind"] = "caption";
    record["caption_id"] = caption.caption_id;
    record["image_id"] = caption.image_id;
    record["lang"] = to_code(caption.language);
    record["text"] = caption.text;
    record["origin"] = to_code(caption.origin);
    out << record.dump() << '\n';
  }
}

void save_canonical(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write corpus file '{}'", path.string()));
  write_canonical(corpus, out);
}

// ---------------------------------------------------------------------------
// COCO import

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(fmt::format("'{}': malformed JSON ({})", path.string(), e.what()));
  }
}

std::string id_string(const json& id, const std::string& where) {
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  if (id.is_string()) return id.get<std::string>();
  throw FormatError(fmt::format("{}: id must be an integer or string", where));
}

const json& array_member(const json& doc, const char* key, const std::string& file) {
  if (!doc.is_object() || !doc.contains(key) || !doc.at(key).is_array()) {
    throw FormatError(fmt::format("'{}': COCO schema mismatch, missing array '{}'", file, key));
  }
  return doc.at(key);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Corpus import_coco(const CocoImportOptions& options) {
  if (options.dataset_name.empty()) throw Error("COCO import needs a dataset name");
  const std::string source =
      options.image_source.empty() ? options.dataset_name : options.image_source;
  const std::string cap_file = options.captions_json.string();
  const json captions_doc = read_json_file(options.captions_json);

  std::vector<ImageRecord> images;
  std::unordered_map<std::string, std::size_t> image_pos;
  for (const json& img : array_member(captions_doc, "images", cap_file)) {
    if (!img.is_object() || !img.contains("id")) {
      throw FormatError(fmt::format("'{}': image entry without id", cap_file));
    }
    ImageRecord rec;
    rec.image_id = source + ":" + id_string(img.at("id"), cap_file);
    rec.dataset = options.dataset_name;
    if (image_pos.emplace(rec.image_id, images.size()).second) images.push_back(std::move(rec));
  }

  std::vector<CaptionRecord> captions;
  const std::string lang_code(to_code(options.language));
  for (const json& ann : array_member(captions_doc, "annotations", cap_file)) {
    if (!ann.is_object() || !ann.contains("id") || !ann.contains("image_id") ||
        !ann.contains("caption") || !ann.at("caption").is_string()) {
      throw FormatError(fmt::format(
          "'{}': COCO schema mismatch, caption annotation needs id, image_id, caption",
          cap_file));
    }
    CaptionRecord rec;
    rec.caption_id = options.dataset_name + ":" + lang_code + ":" +
                     id_string(ann.at("id"), cap_file);
    rec.image_id = source + ":" + id_string(ann.at("image_id"), cap_file);
    rec.language = options.language;
    rec.origin = options.origin;
    rec.text = text::nfc(trim(ann.at("caption").get<std::string>()));
    if (rec.text.empty()) {
      spdlog::warn("import_coco: skipping empty caption {}", rec.caption_id);
      continue;
    }
    captions.push_back(std::move(rec));
  }

  if (options.instances_json) {
    const std::string inst_file = options.instances_json->string();
    const json instances_doc = read_json_file(*options.instances_json);
    std::unordered_map<std::string, std::string> category_names;
    for (const json& cat : array_member(instances_doc, "categories", inst_file)) {
      if (!cat.is_object() || !cat.contains("id")) {
        throw FormatError(fmt::format("'{}': category without id", inst_file));
      }
      const std::string cid = id_string(cat.at("id"), inst_file);
      if (!cat.contains("name") || !cat.at("name").is_string() ||
          cat.at("name").get<std::string>().empty()) {
        throw FormatError(fmt::format("'{}': category id {} without name", inst_file, cid));
      }
      category_names[cid] = text::nfc(cat.at("name").get<std::string>());
    }
    for (ImageRecord& image : images) image.objects.emplace();
    std::size_t skipped = 0;
    for (const json& ann : array_member(instances_doc, "annotations", inst_file)) {
      if (!ann.is_object() || !ann.contains("image_id") || !ann.contains("category_id") ||
          !ann.contains("bbox") || !ann.at("bbox").is_array() || ann.at("bbox").size() != 4) {
        throw FormatError(fmt::format(
            "'{}': COCO schema mismatch, instance needs image_id, category_id, bbox[4]",
            inst_file));
      }
      const std::string cid = id_string(ann.at("category_id"), inst_file);
      auto cat = category_names.find(cid);
      if (cat == category_names.end()) {
        throw FormatError(
            fmt::format("'{}': annotation uses category id {} without name", inst_file, cid));
      }
      auto pos = image_pos.find(source + ":" + id_string(ann.at("image_id"), inst_file));
      if (pos == image_pos.end()) continue;  // image has no captions in this split
      ObjectAnnotation obj;
      obj.class_name = cat->second;
      for (std::size_t k = 0; k < 4; ++k) {
        if (!ann.at("bbox")[k].is_number()) {
          throw FormatError(fmt::format("'{}': non-numeric bbox", inst_file));
        }
        obj.bbox[k] = ann.at("bbox")[k].get<double>();
      }
      if (auto it = ann.find("iscrowd"); it != ann.end() && it->is_number()) {
        obj.crowd = it->get<int>() != 0;
      }
      if (!(obj.bbox[2] > 0.0) || !(obj.bbox[3] > 0.0)) {
        ++skipped;
        continue;
      }
      images[pos->second].objects->push_back(std::move(obj));
    }
    if (skipped > 0) {
      spdlog::warn("import_coco: skipped {} boxes with non-positive size", skipped);
    }
  }

  return Corpus(options.dataset_name, std::move(images), std::move(captions));
}

// ---------------------------------------------------------------------------

Corpus merge(std::span<const Corpus> corpora) {
  std::vector<ImageRecord> images;
  std::vector<CaptionRecord> captions;
  std::unordered_map<std::string, std::size_t> image_pos;
  std::unordered_map<std::string, std::size_t> caption_pos;
  std::vector<std::string> names;
  for (const Corpus& corpus : corpora) {
    if (std::find(names.begin(), names.end(), corpus.name()) == names.end()) {
      names.push_back(corpus.name());
    }
    for (const ImageRecord& image : corpus.images()) {
      auto [it, inserted] = image_pos.emplace(image.image_id, images.size());
      if (inserted) {
        images.push_back(image);
        continue;
      }
      ImageRecord& kept = images[it->second];
      if (!kept.objects && image.objects) {
        kept.objects = image.objects;
      } else if (kept.objects && image.objects && *kept.objects != *image.objects) {
        spdlog::warn("merge: conflicting object annotations for '{}', keeping first",
                     image.image_id);
      }
    }
    for (const CaptionRecord& caption : corpus.captions()) {
      auto [it, inserted] = caption_pos.emplace(caption.caption_id, captions.size());
      if (inserted) {
        captions.push_back(caption);
      } else if (captions[it->second] != caption) {
        throw ValidationError(
            fmt::format("merge: caption_id '{}' has conflicting records", caption.caption_id));
      }
    }
  }
  return Corpus(fmt::format("{}", fmt::join(names, "+")), std::move(images),
                std::move(captions));
}

std::vector<AlignedImage> align_multilingual(const Corpus& corpus,
                                             const std::set<Language>& languages) {
  if (languages.empty()) throw Error("align_multilingual needs at least one language");
  std::vector<AlignedImage> out;
  for (const ImageRecord& image : corpus.images()) {
    AlignedImage aligned;
    aligned.image_id = image.image_id;
    for (std::size_t idx : corpus.captions_of(image.image_id)) {
      const CaptionRecord& caption = corpus.captions()[idx];
      if (languages.count(caption.language)) {
        aligned.caption_ids[caption.language].push_back(caption.caption_id);
      }
    }
    if (aligned.caption_ids.size() == languages.size()) out.push_back(std::move(aligned));
  }
  std::sort(out.begin(), out.end(),
            [](const AlignedImage& a, const AlignedImage& b) { return a.image_id < b.image_id; });
  return out;
}

}  // namespace caplens
