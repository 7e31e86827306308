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

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "caplens/analysis.hpp"
#include "caplens/annotators.hpp"
#include "caplens/cli.hpp"
#include "caplens/conllu.hpp"
#include "caplens/corpus.hpp"
#include "caplens/embeddings.hpp"
#include "caplens/error.hpp"
#include "caplens/numerals.hpp"
#include "caplens/stats.hpp"
#include "caplens/svm.hpp"

namespace py = pybind11;
using namespace caplens;

namespace {

PropertyLabel label_text(const std::string& text, const std::string& lang,
                         const std::string& property, const std::optional<std::string>& conllu) {
  const CaptionRecord caption{"py", "py", language_from_code(lang), text, Origin::Original};
  std::optional<DepSentence> parse;
  if (conllu) {
    // A bare token block gets the caption id the parser requires.
    const std::string block =
        conllu->rfind('#', 0) == 0 ? *conllu : "# caption_id = py\n" + *conllu;
    auto sentences = parse_conllu(std::string_view(block));
    if (sentences.size() != 1) throw ValidationError("expected exactly one CoNLL-U sentence");
    parse = std::move(sentences.front());
  }
  return annotate(caption, property_from_code(property), parse ? &*parse : nullptr);
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_caplens, m) {
  m.doc() = "Caption annotation, statistics and SVM probing";

  auto error = py::register_exception<Error>(m, "CaplensError", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<UnsupportedLanguage>(m, "UnsupportedLanguage", error.ptr());
  py::register_exception<DegenerateData>(m, "DegenerateData", error.ptr());

  py::class_<PropertyLabel>(m, "PropertyLabel")
      .def_property_readonly("outcome", [](const PropertyLabel& l) { return std::string(to_code(l.outcome)); })
      .def_property_readonly("property", [](const PropertyLabel& l) { return std::string(to_code(l.property)); })
      .def_readonly("detail", &PropertyLabel::detail)
      .def("__repr__", [](const PropertyLabel& l) {
        return "<PropertyLabel " + std::string(to_code(l.property)) + " " +
               std::string(to_code(l.outcome)) + (l.detail ? " " + *l.detail : "") + ">";
      });

  m.def("annotate", &label_text, py::arg("text"), py::arg("lang"), py::arg("property"),
        py::arg("conllu") = std::nullopt,
        "Label one caption; `conllu` holds its dependency parse when the property needs one.");
  m.def(
      "numerals",
      [](const std::string& text, const std::string& lang) {
        std::vector<std::pair<std::string, long long>> out;
        for (const auto& n : recognize_numerals(text, language_from_code(lang))) {
          out.emplace_back(n.surface, n.value);
        }
        return out;
      },
      py::arg("text"), py::arg("lang"), "Recognized numerals as (surface, value) pairs.");
  m.def(
      "pearson",
      [](const std::vector<double>& xs, const std::vector<double>& ys) { return pearson(xs, ys); },
      py::arg("xs"), py::arg("ys"), "Sample Pearson r, or None for a constant list.");
  m.def(
      "gamma_scale", [](const std::vector<double>& X, std::size_t dim) { return gamma_scale(X, dim); },
      py::arg("values"), py::arg("dim"));
  m.def(
      "rbf",
      [](const std::vector<double>& x, const std::vector<double>& y, double gamma) {
        return rbf(x, y, gamma);
      },
      py::arg("x"), py::arg("y"), py::arg("gamma"));

  m.def(
      "read_embeddings",
      [](const std::filesystem::path& path) {
        const EmbeddingMatrix e = load_embeddings(path);
        return py::make_tuple(e.ids(), e.dim(), e.values(), e.pretraining_tag());
      },
      py::arg("path"), "Returns (ids, dim, row-major values, pretraining tag).");
  m.def(
      "write_embeddings",
      [](const std::filesystem::path& path, std::vector<std::string> ids, std::uint32_t dim,
         std::vector<float> values, std::string tag) {
        save_embeddings(EmbeddingMatrix(std::move(ids), dim, std::move(values), std::move(tag)), path);
      },
      py::arg("path"), py::arg("ids"), py::arg("dim"), py::arg("values"), py::arg("tag") = "none");

  m.def(
      "corpus_summary",
      [](const std::filesystem::path& path) {
        const Corpus c = load_canonical(path);
        py::dict d;
        d["images"] = c.images().size();
        d["captions"] = c.captions().size();
        std::vector<std::string> langs;
        for (Language l : c.languages()) langs.emplace_back(to_code(l));
        d["languages"] = langs;
        return d;
      },
      py::arg("path"));

  m.def("run", &run_cli, py::arg("args"),
        "Run the command line in-process; returns (exit code, stdout, stderr).");
}
