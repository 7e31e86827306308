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

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "caplens/embeddings.hpp"
#include "caplens/error.hpp"

using namespace caplens;

namespace {

// Builds files byte by byte, independently of the writer.
struct Bytes {
  std::string data;
  void raw(const void* p, std::size_t n) { data.append(static_cast<const char*>(p), n); }
  template <typename T>
  void le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      data.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
    }
  }
  void f32(float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    le(bits);
  }
  void header(std::uint32_t dim, std::uint64_t count, std::string_view tag = "none") {
    raw("CEMB", 4);
    le<std::uint16_t>(1);
    le(dim);
    le(count);
    le(static_cast<std::uint16_t>(tag.size()));
    raw(tag.data(), tag.size());
  }
  void record(std::string_view id, std::initializer_list<float> values) {
    le(static_cast<std::uint16_t>(id.size()));
    raw(id.data(), id.size());
    for (float v : values) f32(v);
  }
};

Bytes two_records() {
  Bytes b;
  b.header(4, 2, "moco");
  b.record("coco:1", {0.5f, -1.0f, 2.0f, 0.0f});
  b.record("coco:2", {1.0f, 1.5f, -2.5f, 3.25f});
  return b;
}

EmbeddingMatrix read_string(const std::string& s) {
  std::istringstream in(s);
  return read_embeddings(in);
}

std::string write_string(const EmbeddingMatrix& m) {
  std::ostringstream out;
  write_embeddings(m, out);
  return out.str();
}

ClassificationDataset dataset_of(std::size_t n) {
  ClassificationDataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    ds.items.push_back({"img:" + std::to_string(i), i % 2 == 0, i % 2 == 0 ? 1.0 : 0.0});
  }
  return ds;
}

EmbeddingMatrix matrix_of(std::size_t n, std::uint32_t dim) {
  std::vector<std::string> ids;
  std::vector<float> values;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("img:" + std::to_string(i));
    for (std::uint32_t k = 0; k < dim; ++k) values.push_back(static_cast<float>(i * 10 + k));
  }
  return EmbeddingMatrix(ids, dim, values);
}

}  // namespace

TEST_SUITE("embeddings") {
  TEST_CASE("read two records") {
    const auto m = read_string(two_records().data);
    CHECK(m.size() == 2);
    CHECK(m.dim() == 4);
    CHECK(m.pretraining_tag() == "moco");
    CHECK(m.ids() == std::vector<std::string>{"coco:1", "coco:2"});
    CHECK(m.row(1)[3] == 3.25f);
    CHECK(m.find("coco:2") == 1);
    CHECK(m.find("coco:3") == -1);
  }

  TEST_CASE("truncation reports the byte offset") {
    const std::string full = two_records().data;
    const std::string cut = full.substr(0, full.size() - 6);
    try {
      read_string(cut);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      REQUIRE(e.offset());
      // The second record starts right after the first one.
      const std::uint64_t header = 4 + 2 + 4 + 8 + 2 + 4;
      const std::uint64_t first = 2 + 6 + 16;
      CHECK(*e.offset() >= header + first);
      CHECK(*e.offset() <= cut.size());
      CHECK(std::string(e.what()).find(std::to_string(*e.offset())) != std::string::npos);
    }
  }

  TEST_CASE("bad magic is rejected") {
    std::string bytes = two_records().data;
    bytes[0] = 'X';
    CHECK_THROWS_AS(read_string(bytes), FormatError);
  }

  TEST_CASE("non-finite values are rejected with their offset") {
    for (float bad : {std::numeric_limits<float>::quiet_NaN(), std::numeric_limits<float>::infinity()}) {
      Bytes b;
      b.header(2, 1);
      b.record("x", {1.0f, bad});
      try {
        read_string(b.data);
        FAIL("expected a format error");
      } catch (const FormatError& e) {
        REQUIRE(e.offset());
        CHECK(*e.offset() == b.data.size() - 4);
      }
    }
  }

  TEST_CASE("trailing bytes and unknown versions are rejected") {
    CHECK_THROWS_AS(read_string(two_records().data + "z"), FormatError);
    std::string bytes = two_records().data;
    bytes[4] = 2;
    CHECK_THROWS_AS(read_string(bytes), FormatError);
  }

  TEST_CASE("round-trip is byte-identical") {
    const std::string bytes = two_records().data;
    CHECK(write_string(read_string(bytes)) == bytes);
  }

  TEST_CASE("records are written in id order") {
    const EmbeddingMatrix m({"b", "a"}, 1, {2.0f, 1.0f});
    Bytes b;
    b.header(1, 2);
    b.record("a", {1.0f});
    b.record("b", {2.0f});
    CHECK(write_string(m) == b.data);
  }

  TEST_CASE("empty matrix") {
    const EmbeddingMatrix m({}, 8, {}, "clip");
    const std::string bytes = write_string(m);
    Bytes b;
    b.header(8, 0, "clip");
    CHECK(bytes == b.data);
    CHECK(read_string(bytes).size() == 0);
  }

  TEST_CASE("one record has the exact layout size") {
    const EmbeddingMatrix m({"flickr30k:1234"}, 16, std::vector<float>(16, 0.25f), "imagenet");
    CHECK(write_string(m).size() == embedding_header_size("imagenet") + 2 + 14 + 4 * 16);
    CHECK(embedding_header_size("imagenet") == 4 + 2 + 4 + 8 + 2 + 8);
  }

  TEST_CASE("duplicate ids and non-finite values are rejected") {
    CHECK_THROWS_AS(EmbeddingMatrix({"a", "a"}, 1, {1.0f, 2.0f}), ValidationError);
    CHECK_THROWS_AS(EmbeddingMatrix({"a"}, 1, {std::nanf("")}), ValidationError);
    Bytes b;
    b.header(1, 2);
    b.record("a", {1.0f});
    b.record("a", {2.0f});
    CHECK_THROWS_AS(read_string(b.data), FormatError);
  }

  TEST_CASE("join with every id present") {
    const auto ds = dataset_of(6);
    const auto j = join(ds, matrix_of(6, 3));
    CHECK(j.rows() == 6);
    CHECK(j.missing.empty());
    CHECK(j.X.size() == 18);
    CHECK(j.X[3 * 5 + 2] == 52.0);
    CHECK(j.y[0] == 1);
    CHECK(j.y[1] == -1);
  }

  TEST_CASE("join reports a missing id") {
    const auto ds = dataset_of(10);
    std::vector<std::string> ids;
    std::vector<float> values;
    for (std::size_t i = 0; i < 10; ++i) {
      if (i == 7) continue;
      ids.push_back("img:" + std::to_string(i));
      values.push_back(static_cast<float>(i));
    }
    const auto j = join(ds, EmbeddingMatrix(ids, 1, values));
    CHECK(j.rows() == 9);
    CHECK(j.missing == std::vector<std::string>{"img:7"});
    CHECK(std::find(j.item_index.begin(), j.item_index.end(), 7u) == j.item_index.end());
  }

  TEST_CASE("join of an empty dataset") {
    const auto j = join(ClassificationDataset{}, matrix_of(3, 2));
    CHECK(j.rows() == 0);
    CHECK(j.X.empty());
    CHECK(j.missing.empty());
  }
}
