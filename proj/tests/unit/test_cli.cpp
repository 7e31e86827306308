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

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "caplens/cli.hpp"
#include "caplens/corpus.hpp"
#include "caplens/embeddings.hpp"
#include "caplens/error.hpp"
#include "caplens/manifest.hpp"
#include "support/gold.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace caplens;
namespace ct = caplens::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string s(const fs::path& p) { return p.string(); }

fs::path fixture(const std::string& name) { return ct::test_data_dir() / "fixtures" / name; }

// The manifest as JSON without its timestamps.
nlohmann::json stable_manifest(const fs::path& output) {
  auto j = nlohmann::json::parse(ct::read_file(manifest_path_for(output)));
  j.erase("started_at");
  j.erase("finished_at");
  return j;
}

// Corpus and embeddings on disk for the pipeline tests.
struct Workspace {
  ct::TempDir dir;
  fs::path corpus = dir / "corpus.jsonl";
  fs::path embeddings = dir / "emb.cemb";

  Workspace() {
    const auto e2e = ct::make_end_to_end(200, 4, 0.0, 5);
    save_canonical(e2e.corpus, corpus);
    save_embeddings(e2e.embeddings, embeddings);
  }

  // annotate -> probabilities -> build-dataset -> train; returns the CV path.
  fs::path pipeline(const std::string& seed) {
    REQUIRE(invoke({"annotate", "--corpus", s(corpus), "--property", "num", "--out",
                 s(dir / "num.jsonl"), "--jobs", "2"})
                .code == 0);
    REQUIRE(invoke({"stats", "probabilities", "--corpus", s(corpus), "--labels", s(dir / "num.jsonl"),
                 "--scope", "en", "--out", s(dir / "num.probs.jsonl")})
                .code == 0);
    REQUIRE(invoke({"build-dataset", "--probabilities", s(dir / "num.probs.jsonl"), "--seed", seed,
                 "--out", s(dir / "num.dataset.json")})
                .code == 0);
    const auto r = invoke({"train", "--dataset", s(dir / "num.dataset.json"), "--embeddings",
                        s(embeddings), "--folds", "5", "--seed", seed, "--jobs", "1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find(" ± ") != std::string::npos);
    return dir / "num.dataset.json.cv.json";
  }
};

int exit_status(const std::string& command) {
  const int raw = std::system(command.c_str());
  REQUIRE(WIFEXITED(raw));
  return WEXITSTATUS(raw);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage errors") {
    auto r = invoke({"--help"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("annotate") != std::string::npos);
    CHECK(invoke({"train", "--help"}).code == cli::kExitOk);
    CHECK(invoke({}).code == cli::kExitUserError);
    CHECK(invoke({"frobnicate"}).code == cli::kExitUserError);
    CHECK(invoke({"annotate", "--bogus"}).code == cli::kExitUserError);
    CHECK(invoke({"annotate", "--corpus", "/nonexistent.jsonl", "--property", "num", "--out", "x"})
              .code == cli::kExitUserError);
  }

  TEST_CASE("bad input data is a user error") {
    ct::TempDir dir;
    ct::write_file(dir / "bad.jsonl", "{\"kind\":\"image\"\n");
    const auto r = invoke({"annotate", "--corpus", s(dir / "bad.jsonl"), "--property", "num",
                        "--out", s(dir / "l.jsonl")});
    CHECK(r.code == cli::kExitUserError);
    CHECK(r.err.find("error:") == 0);
    CHECK(invoke({"annotate", "--corpus", s(fixture("tiny_corpus.jsonl")), "--property", "size",
               "--out", s(dir / "l.jsonl")})
              .code == cli::kExitUserError);
  }

  TEST_CASE("exceptions map to exit codes") {
    std::ostringstream err;
    CHECK(cli::guarded([] { return 0; }, err) == cli::kExitOk);
    CHECK(cli::guarded([]() -> int { throw FormatError("broken", 3); }, err) ==
          cli::kExitUserError);
    CHECK(cli::guarded(
              []() -> int {
                throw fs::filesystem_error("denied", std::make_error_code(std::errc::permission_denied));
              },
              err) == cli::kExitUserError);
    CHECK(cli::guarded([]() -> int { throw std::logic_error("invariant broken"); }, err) ==
          cli::kExitInternalError);
    CHECK(err.str().find("internal error: invariant broken") != std::string::npos);
  }

  TEST_CASE("the executable reports exit codes") {
    const char* exe = std::getenv("CAPLENS_CLI");
    if (exe == nullptr || *exe == '\0') {
      MESSAGE("CAPLENS_CLI not set; skipping the process-level check");
      return;
    }
    const std::string quiet = " >/dev/null 2>&1";
    CHECK(exit_status(std::string(exe) + " --help" + quiet) == 0);
    CHECK(exit_status(std::string(exe) + " --bogus" + quiet) == 1);
    CHECK(exit_status(std::string(exe) + " report --results /" + quiet) == 1);
  }

  TEST_CASE("annotate writes labels and a manifest") {
    ct::TempDir dir;
    const fs::path out = dir / "labels.jsonl";
    const auto r = invoke({"annotate", "--corpus", s(fixture("tiny_corpus.jsonl")), "--conllu",
                        s(fixture("tiny.conllu")), "--property", "tran", "--lang", "en", "--out",
                        s(out)});
    REQUIRE(r.code == 0);
    const std::string labels = ct::read_file(out);
    CHECK(labels.find("\"coco:en:2\"") != std::string::npos);
    CHECK(labels.find("flickr30k:de:1") == std::string::npos);
    const RunManifest m = load_manifest(manifest_path_for(out));
    CHECK(m.command == "annotate");
    CHECK(m.inputs.size() == 2);
    CHECK(m.inputs[0].sha256 == sha256_path(fixture("tiny_corpus.jsonl")));
    CHECK(m.outputs == std::vector<std::string>{out.generic_string()});
    CHECK(m.config.at("property") == "tran");
  }

  TEST_CASE("pipeline manifests are reproducible") {
    Workspace ws;
    const fs::path cv = ws.pipeline("42");
    const auto outputs = {ws.dir / "num.jsonl", ws.dir / "num.probs.jsonl",
                          ws.dir / "num.dataset.json", cv};
    std::vector<std::string> first_bytes;
    std::vector<nlohmann::json> first_manifests;
    for (const auto& o : outputs) {
      first_bytes.push_back(ct::read_file(o));
      first_manifests.push_back(stable_manifest(o));
    }
    CHECK(first_manifests[2]["seeds"]["balance"] == 42);
    CHECK(first_manifests[3]["seeds"]["folds"] == 42);
    const auto cv_json = nlohmann::json::parse(first_bytes[3]);
    CHECK(cv_json["mean"].get<double>() >= 90.0);

    ws.pipeline("42");
    std::size_t i = 0;
    for (const auto& o : outputs) {
      CHECK(ct::read_file(o) == first_bytes[i]);
      CHECK(stable_manifest(o) == first_manifests[i]);
      ++i;
    }

    // Replaying the recorded command reproduces the output.
    fs::remove(cv);
    REQUIRE(invoke({"replay", "--manifest", s(manifest_path_for(cv))}).code == 0);
    CHECK(ct::read_file(cv) == first_bytes[3]);
  }

  TEST_CASE("analyses and report through the command line") {
    Workspace ws;
    ws.pipeline("7");
    const fs::path results = ws.dir / "results";
    fs::create_directories(results / "cv");
    fs::create_directories(results / "agreement");
    REQUIRE(invoke({"stats", "prevalence", "--corpus", s(ws.corpus), "--labels",
                 s(ws.dir / "num.jsonl"), "--out", s(results / "prevalence.json")})
                .code == 0);
    fs::copy_file(ws.dir / "num.dataset.json.cv.json", results / "cv" / "num.json");

    auto r = invoke({"report", "--results", s(results)});
    CHECK(r.code == cli::kExitUserError);
    CHECK(r.err.find("agreement") != std::string::npos);

    const auto bilingual = ct::make_bilingual_corpus(50, true, 3);
    save_canonical(bilingual, ws.dir / "bi.jsonl");
    REQUIRE(invoke({"annotate", "--corpus", s(ws.dir / "bi.jsonl"), "--property", "num", "--out",
                 s(ws.dir / "bi.num.jsonl")})
                .code == 0);
    r = invoke({"analyze", "crosslingual", "--corpus", s(ws.dir / "bi.jsonl"), "--labels",
             s(ws.dir / "bi.num.jsonl"), "--pairs", "de:en", "--out",
             s(results / "agreement" / "crosslingual.csv")});
    REQUIRE(r.code == 0);
    CHECK(ct::read_file(results / "agreement" / "crosslingual.csv").find("De/En,de,en,num,50,1.000000") !=
          std::string::npos);

    r = invoke({"report", "--results", s(results)});
    REQUIRE(r.code == 0);
    for (const char* t : {"table2_prevalence.csv", "table3_multilingual.csv",
                          "table4_monolingual.csv", "table5_agreement.csv"}) {
      CHECK(fs::is_regular_file(results / "tables" / t));
    }
    CHECK(fs::is_regular_file(results / "tables" / "manifest.json"));

    fs::remove(results / "cv" / "num.json");
    r = invoke({"report", "--results", s(results)});
    CHECK(r.code == cli::kExitUserError);
    CHECK(r.err.find((results / "cv").string()) != std::string::npos);
  }

  TEST_CASE("count analysis on the command line") {
    ct::TempDir dir;
    const auto f = ct::make_count_corpus(3);
    save_canonical(f.corpus, dir / "counts.jsonl");
    for (const char* p : {"num", "quant"}) {
      REQUIRE(invoke({"annotate", "--corpus", s(dir / "counts.jsonl"), "--property", p, "--out",
                   s(dir / (std::string(p) + ".jsonl"))})
                  .code == 0);
    }
    const auto r = invoke({"analyze", "counts", "--corpus", s(dir / "counts.jsonl"), "--labels",
                        s(dir / "num.jsonl") + "," + s(dir / "quant.jsonl"), "--min-bucket", "100"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("k,n_images,e_num,e_quant,is_peak\n", 0) == 0);
    CHECK(r.out.find("\n4,150,0.700000,") != std::string::npos);
    CHECK(r.out.find("\n9,") == std::string::npos);
  }
}
