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

#include "caplens/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "caplens/analysis.hpp"
#include "caplens/annotators.hpp"
#include "caplens/conllu.hpp"
#include "caplens/corpus.hpp"
#include "caplens/dataset.hpp"
#include "caplens/embeddings.hpp"
#include "caplens/error.hpp"
#include "caplens/lexicons.hpp"
#include "caplens/manifest.hpp"
#include "caplens/report.hpp"
#include "caplens/stats.hpp"
#include "caplens/svm.hpp"

namespace caplens::cli {

namespace fs = std::filesystem;

namespace {

// Tracks provenance for one invocation.
class Run {
 public:
  Run(std::string command, std::vector<std::string> argv) {
    manifest_.command = std::move(command);
    manifest_.argv = std::move(argv);
    manifest_.version = tool_version();
    manifest_.started_at = utc_timestamp();
  }

  void input(const fs::path& path) {
    std::error_code ec;
    const auto bytes = fs::is_regular_file(path, ec) ? fs::file_size(path, ec) : 0;
    manifest_.inputs.push_back({path.generic_string(), sha256_path(path), bytes});
  }
  void seed(const std::string& name, std::uint64_t value) { manifest_.seeds[name] = value; }
  void config(const CLI::App& app) {
    for (const CLI::Option* opt : app.get_options()) {
      if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& results = opt->results();
        if (opt->get_expected_max() > 1 || results.size() > 1) {
          manifest_.config[name] = results;
        } else if (opt->get_type_size() == 0) {
          manifest_.config[name] = true;
        } else {
          manifest_.config[name] = results.empty() ? std::string() : results.front();
        }
      } else if (!opt->get_default_str().empty()) {
        manifest_.config[name] = opt->get_default_str();
      }
    }
  }
  void set(const std::string& key, nlohmann::ordered_json value) {
    manifest_.config[key] = std::move(value);
  }

  // Writes the manifest next to `output`; skipped for stdout.
  void finish(const std::vector<fs::path>& outputs) {
    if (outputs.empty()) return;
    for (const auto& o : outputs) manifest_.outputs.push_back(o.generic_string());
    manifest_.finished_at = utc_timestamp();
    write_manifest(manifest_, manifest_path_for(outputs.front()));
  }

 private:
  RunManifest manifest_;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

unsigned resolve_jobs(unsigned jobs) {
  return jobs > 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
}

// Labels by property; a repeated property is a user error.
std::map<Property, AnnotatedCorpus> load_label_files(const std::vector<std::string>& paths,
                                                     Run& run) {
  std::map<Property, AnnotatedCorpus> out;
  for (const auto& p : paths) {
    run.input(p);
    AnnotatedCorpus labels = load_labels(p);
    const Property prop = labels.property();
    if (!out.emplace(prop, std::move(labels)).second) {
      throw Error(fmt::format("two label files for property '{}'", to_code(prop)));
    }
  }
  return out;
}

const AnnotatedCorpus& need(const std::map<Property, AnnotatedCorpus>& labels, Property p) {
  const auto it = labels.find(p);
  if (it == labels.end()) {
    throw Error(fmt::format("no '{}' labels among --labels", to_code(p)));
  }
  return it->second;
}

// Writes `text` to `out_path`, or to the stream when no path is given.
std::vector<fs::path> emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << text;
    return {};
  }
  auto f = open_out(out_path);
  f << text;
  return {fs::path(out_path)};
}

std::pair<Language, Language> parse_pair(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw Error(fmt::format("language pair '{}' must look like de:en", text));
  }
  return {language_from_code(text.substr(0, colon)), language_from_code(text.substr(colon + 1))};
}

void setup_logging(const std::string& level) {
  auto logger = spdlog::get("caplens");
  if (!logger) {
    logger = spdlog::stderr_color_mt("caplens");
    logger->set_pattern("[%l] %v");
  }
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"caplens: linguistic-property analysis of image-caption corpora"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")
      ->capture_default_str()
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::function<std::vector<fs::path>(Run&)> action;
  std::string command;
  const CLI::App* active = nullptr;
  auto bind = [&](CLI::App* sub, std::string name, std::function<std::vector<fs::path>(Run&)> fn) {
    sub->callback([&, sub, name = std::move(name), fn = std::move(fn)] {
      command = name;
      action = fn;
      active = sub;
    });
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Convert corpora to the canonical JSONL form");
  ingest->require_subcommand(1);

  auto* ing_can = ingest->add_subcommand("canonical", "Validate and merge canonical corpora");
  std::vector<std::string> can_in;
  std::string can_out;
  std::string can_name;
  ing_can->add_option("--in", can_in, "Canonical JSONL corpus (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  ing_can->add_option("--name", can_name, "Name of the merged corpus");
  ing_can->add_option("--out", can_out, "Output corpus")->required();
  bind(ing_can, "ingest canonical", [&](Run& run) {
    std::vector<Corpus> corpora;
    for (const auto& p : can_in) {
      run.input(p);
      corpora.push_back(load_canonical(p));
    }
    Corpus merged = corpora.size() == 1 ? std::move(corpora.front()) : merge(corpora);
    if (!can_name.empty()) {
      merged = Corpus(can_name, {merged.images().begin(), merged.images().end()},
                      {merged.captions().begin(), merged.captions().end()});
    }
    save_canonical(merged, can_out);
    spdlog::info("{} images, {} captions", merged.images().size(), merged.captions().size());
    return std::vector<fs::path>{can_out};
  });

  auto* ing_coco = ingest->add_subcommand("coco", "Import COCO-style captions and instances");
  CocoImportOptions coco;
  std::string coco_captions, coco_instances, coco_lang = "en", coco_origin = "original", coco_out;
  ing_coco->add_option("--captions", coco_captions, "captions_*.json")
      ->required()
      ->check(CLI::ExistingFile);
  ing_coco->add_option("--instances", coco_instances, "instances_*.json")
      ->check(CLI::ExistingFile);
  ing_coco->add_option("--lang", coco_lang, "Caption language")->capture_default_str();
  ing_coco->add_option("--dataset", coco.dataset_name, "Dataset name")->required();
  ing_coco->add_option("--origin", coco_origin, "original or translated")->capture_default_str();
  ing_coco->add_option("--image-source", coco.image_source,
                       "Image-id namespace shared across datasets (default: --dataset)");
  ing_coco->add_option("--out", coco_out, "Output corpus")->required();
  bind(ing_coco, "ingest coco", [&](Run& run) {
    coco.captions_json = coco_captions;
    run.input(coco_captions);
    if (!coco_instances.empty()) {
      coco.instances_json = fs::path(coco_instances);
      run.input(coco_instances);
    }
    coco.language = language_from_code(coco_lang);
    coco.origin = origin_from_code(coco_origin);
    const Corpus corpus = import_coco(coco);
    save_canonical(corpus, coco_out);
    return std::vector<fs::path>{coco_out};
  });

  // annotate
  auto* annotate_cmd = app.add_subcommand("annotate", "Label captions for one property");
  std::string ann_corpus, ann_property, ann_lang, ann_out, ann_lexicons;
  std::vector<std::string> ann_conllu;
  unsigned ann_jobs = 0;
  annotate_cmd->add_option("--corpus", ann_corpus, "Canonical corpus")
      ->required()
      ->check(CLI::ExistingFile);
  annotate_cmd->add_option("--conllu", ann_conllu, "Dependency parses (repeatable)")
      ->check(CLI::ExistingFile);
  annotate_cmd->add_option("--property", ann_property, "num, quant, neg, pass, tran or verb")
      ->required();
  annotate_cmd->add_option("--lang", ann_lang, "Only label captions in this language");
  annotate_cmd->add_option("--out", ann_out, "Label JSONL")->required();
  annotate_cmd->add_option("--jobs", ann_jobs, "Worker threads (0: all cores)")
      ->capture_default_str();
  annotate_cmd->add_option("--lexicons", ann_lexicons, "Directory overriding the built-in lexicons")
      ->check(CLI::ExistingDirectory);
  bind(annotate_cmd, "annotate", [&](Run& run) {
    const Property property = property_from_code(ann_property);
    run.input(ann_corpus);
    Corpus corpus = load_canonical(ann_corpus);
    if (!ann_lang.empty()) {
      const Language lang = language_from_code(ann_lang);
      if (!is_supported(property, lang)) {
        spdlog::warn("{} is not defined for {}; every caption will be filtered",
                     display_name(property), display_name(lang));
      }
      std::vector<CaptionRecord> kept;
      for (const CaptionRecord& c : corpus.captions()) {
        if (c.language == lang) kept.push_back(c);
      }
      corpus = Corpus(corpus.name(), {corpus.images().begin(), corpus.images().end()},
                      std::move(kept));
    }
    std::optional<ParseIndex> parses;
    if (!ann_conllu.empty()) {
      std::vector<DepSentence> sentences;
      for (const auto& p : ann_conllu) {
        run.input(p);
        std::ifstream in(p, std::ios::binary);
        try {
          auto part = parse_conllu(in);
          std::move(part.begin(), part.end(), std::back_inserter(sentences));
        } catch (const FormatError& e) {
          throw FormatError(fmt::format("{}: {}", p, e.what()), e.line(), e.offset());
        }
      }
      parses = attach_parses(corpus, std::move(sentences));
      spdlog::info("parse coverage {:.3f} ({} unknown ids)", parses->coverage, parses->unknown);
    }
    std::optional<Lexicons> custom;
    if (!ann_lexicons.empty()) {
      run.input(ann_lexicons);
      custom = Lexicons::load_directory(ann_lexicons);
    }
    const unsigned jobs = resolve_jobs(ann_jobs);
    const AnnotatedCorpus labels =
        annotate_corpus(corpus, parses ? &*parses : nullptr, property, jobs,
                        custom ? *custom : Lexicons::builtin());
    auto f = open_out(ann_out);
    write_labels(labels, f);
    spdlog::info("{} positive, {} negative, {} filtered", labels.count(Outcome::Positive),
                 labels.count(Outcome::Negative), labels.count(Outcome::Filtered));
    return std::vector<fs::path>{ann_out};
  });

  // stats
  auto* stats = app.add_subcommand("stats", "Per-image probabilities and expectations");
  stats->require_subcommand(1);
  auto* prevalence = stats->add_subcommand("prevalence", "E[P] per language and property");
  std::string prev_corpus, prev_out;
  std::vector<std::string> prev_labels;
  prevalence->add_option("--corpus", prev_corpus)->required()->check(CLI::ExistingFile);
  prevalence->add_option("--labels", prev_labels, "Label files, comma separated or repeated")
      ->required()
      ->delimiter(',')
      ->check(CLI::ExistingFile);
  prevalence->add_option("--out", prev_out, "prevalence.json (default: stdout)");
  bind(prevalence, "stats prevalence", [&](Run& run) {
    run.input(prev_corpus);
    const Corpus corpus = load_canonical(prev_corpus);
    std::vector<AnnotatedCorpus> annotations;
    for (auto& [p, l] : load_label_files(prev_labels, run)) annotations.push_back(std::move(l));
    return emit(prevalence_to_json(prevalence_table(corpus, annotations)), prev_out, out);
  });

  auto* probabilities = stats->add_subcommand("probabilities", "P(I) for every image");
  std::string prob_corpus, prob_labels, prob_scope = "all", prob_out;
  probabilities->add_option("--corpus", prob_corpus)->required()->check(CLI::ExistingFile);
  probabilities->add_option("--labels", prob_labels)->required()->check(CLI::ExistingFile);
  probabilities->add_option("--scope", prob_scope, "all, en, de+en, de/original, ...")
      ->capture_default_str();
  probabilities->add_option("--out", prob_out, "Probability JSONL (default: stdout)");
  bind(probabilities, "stats probabilities", [&](Run& run) {
    run.input(prob_corpus);
    run.input(prob_labels);
    const Corpus corpus = load_canonical(prob_corpus);
    const AnnotatedCorpus labels = load_labels(prob_labels);
    const auto probs = image_probabilities(corpus, labels, scope_from_string(prob_scope));
    std::ostringstream buf;
    write_probabilities(probs, buf);
    return emit(buf.str(), prob_out, out);
  });

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "Binarize at the median and balance");
  std::string build_probs, build_out;
  std::uint64_t build_seed = 0;
  build->add_option("--probabilities", build_probs)->required()->check(CLI::ExistingFile);
  build->add_option("--seed", build_seed, "Balancing seed")->required();
  build->add_option("--out", build_out, "Dataset manifest JSON")->required();
  bind(build, "build-dataset", [&](Run& run) {
    run.input(build_probs);
    run.seed("balance", build_seed);
    std::ifstream in(build_probs, std::ios::binary);
    const auto probs = read_probabilities(in);
    const ClassificationDataset ds = build_dataset(probs, build_seed);
    save_dataset(ds, build_out);
    spdlog::info("threshold {:.6f}, {} images per class", ds.threshold, ds.positives());
    return std::vector<fs::path>{build_out};
  });

  // train
  auto* train_cmd = app.add_subcommand("train", "Cross-validate an RBF SVM on embeddings");
  std::string tr_dataset, tr_embeddings, tr_gamma = "scale", tr_out, tr_model;
  int tr_folds = 5;
  std::uint64_t tr_seed = 0;
  SvmConfig tr_config;
  std::size_t tr_cache_mb = 0;
  unsigned tr_jobs = 0;
  train_cmd->add_option("--dataset", tr_dataset)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--embeddings", tr_embeddings)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--folds", tr_folds)->capture_default_str()->check(CLI::Range(2, 1000));
  train_cmd->add_option("--seed", tr_seed, "Fold assignment seed")->required();
  train_cmd->add_option("--C", tr_config.C)->capture_default_str();
  train_cmd->add_option("--gamma", tr_gamma, "'scale' or a positive number")
      ->capture_default_str();
  train_cmd->add_option("--tol", tr_config.tolerance)->capture_default_str();
  train_cmd->add_option("--max-iter", tr_config.max_iter, "0: max(1e7, 100 n)")
      ->capture_default_str();
  train_cmd->add_option("--max-train", tr_config.max_train, "Seeded training subsample, 0 = off")
      ->capture_default_str();
  train_cmd->add_option("--cache-mb", tr_cache_mb, "Kernel cache MB (default: $CAPLENS_CACHE or 100)");
  train_cmd->add_option("--jobs", tr_jobs, "Folds trained concurrently (0: all cores)")
      ->capture_default_str();
  train_cmd->add_option("--out", tr_out, "CV result JSON (default: <dataset>.cv.json)");
  train_cmd->add_option("--model-out", tr_model, "Also fit on every item and save the model");
  bind(train_cmd, "train", [&](Run& run) {
    run.input(tr_dataset);
    run.input(tr_embeddings);
    run.seed("folds", tr_seed);
    if (tr_gamma != "scale") {
      try {
        std::size_t used = 0;
        tr_config.gamma = std::stod(tr_gamma, &used);
        if (used != tr_gamma.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::logic_error&) {
        throw Error(fmt::format("--gamma must be 'scale' or a number, got '{}'", tr_gamma));
      }
    }
    tr_config.cache_bytes = tr_cache_mb > 0 ? tr_cache_mb << 20
                                            : cache_bytes_from_env(std::size_t{100} << 20);
    run.set("cache_bytes", tr_config.cache_bytes);
    const ClassificationDataset ds = load_dataset(tr_dataset);
    const EmbeddingMatrix emb = load_embeddings(tr_embeddings);
    const FoldSplit folds = kfold(ds, tr_folds, tr_seed);
    CvResult result = cross_validate(ds, folds, emb, tr_config, resolve_jobs(tr_jobs));
    result.seed = tr_seed;
    if (!result.converged) spdlog::warn("at least one fold stopped at the iteration cap");
    const std::string out_path = tr_out.empty() ? tr_dataset + ".cv.json" : tr_out;
    std::vector<fs::path> outputs = emit(cv_result_to_json(result), out_path, out);
    out << fmt::format("{} {} [{}]: {}\n", to_code(result.property), to_string(result.scope),
                       result.pretraining_tag, result.cell());
    if (!tr_model.empty()) {
      const JoinedFeatures joined = join(ds, emb);
      const SvmModel model =
          train(TrainingData{joined.X, joined.dim, joined.y}, tr_config, tr_seed);
      if (fs::path(tr_model).has_parent_path()) fs::create_directories(fs::path(tr_model).parent_path());
      save_model(model, tr_model);
      outputs.push_back(tr_model);
    }
    return outputs;
  });

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Corpus analyses");
  analyze->require_subcommand(1);
  std::string an_corpus, an_lang = "en", an_out;
  std::vector<std::string> an_labels;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--corpus", an_corpus)->required()->check(CLI::ExistingFile);
    sub->add_option("--labels", an_labels, "Label files, comma separated or repeated")
        ->required()
        ->delimiter(',')
        ->check(CLI::ExistingFile);
    sub->add_option("--out", an_out, "CSV output (default: stdout)");
  };

  auto* classes = analyze->add_subcommand("classes", "Numeral expectation per object class");
  common(classes);
  std::vector<std::string> cls_datasets;
  classes->add_option("--lang", an_lang)->capture_default_str();
  classes->add_option("--datasets", cls_datasets, "Restrict to these datasets")->delimiter(',');
  bind(classes, "analyze classes", [&](Run& run) {
    run.input(an_corpus);
    const Corpus corpus = load_canonical(an_corpus);
    const auto labels = load_label_files(an_labels, run);
    const auto probs = image_probabilities(corpus, need(labels, Property::Num),
                                           CaptionScope::only(language_from_code(an_lang)));
    ClassAnalysisOptions options;
    options.datasets = {cls_datasets.begin(), cls_datasets.end()};
    const auto ranked = class_expectations(corpus, probs, options);
    std::ostringstream buf;
    write_class_csv(ranked, buf);
    return emit(buf.str(), an_out, out);
  });

  auto* counts = analyze->add_subcommand("counts", "E[P_num], E[P_quant] by box count");
  common(counts);
  std::size_t min_bucket = 100;
  counts->add_option("--lang", an_lang)->capture_default_str();
  counts->add_option("--min-bucket", min_bucket, "Drop k with fewer images")->capture_default_str();
  bind(counts, "analyze counts", [&](Run& run) {
    run.input(an_corpus);
    const Corpus corpus = load_canonical(an_corpus);
    const auto labels = load_label_files(an_labels, run);
    const CaptionScope scope = CaptionScope::only(language_from_code(an_lang));
    const auto num = image_probabilities(corpus, need(labels, Property::Num), scope);
    std::optional<std::vector<PropertyProbability>> quant;
    if (labels.count(Property::Quant)) {
      quant = image_probabilities(corpus, labels.at(Property::Quant), scope);
    }
    const CountCurve curve =
        count_curve(corpus, num,
                    quant ? std::optional<std::span<const PropertyProbability>>(*quant)
                          : std::nullopt,
                    min_bucket);
    if (curve.crowd_boxes > 0) spdlog::info("{} crowd boxes counted", curve.crowd_boxes);
    std::ostringstream buf;
    write_curve_csv(curve, buf);
    return emit(buf.str(), an_out, out);
  });

  auto* crossling = analyze->add_subcommand("crosslingual", "Pearson r between languages");
  common(crossling);
  std::vector<std::string> pairs;
  crossling->add_option("--pairs", pairs, "Language pairs such as de:en (default: all)")
      ->delimiter(',');
  bind(crossling, "analyze crosslingual", [&](Run& run) {
    run.input(an_corpus);
    const Corpus corpus = load_canonical(an_corpus);
    const auto labels = load_label_files(an_labels, run);
    std::vector<std::pair<Language, Language>> wanted;
    for (const auto& p : pairs) wanted.push_back(parse_pair(p));
    if (wanted.empty()) {
      const std::vector<Language> langs(corpus.languages().begin(), corpus.languages().end());
      for (std::size_t i = 0; i < langs.size(); ++i) {
        for (std::size_t j = i + 1; j < langs.size(); ++j) wanted.emplace_back(langs[i], langs[j]);
      }
    }
    std::vector<CorrelationResult> results;
    for (const auto& [a, b] : wanted) {
      for (const auto& [prop, l] : labels) {
        if (!is_supported(prop, a) || !is_supported(prop, b)) continue;
        results.push_back(crosslingual_agreement(corpus, l, a, b));
      }
    }
    std::ostringstream buf;
    write_correlation_csv(results, buf);
    return emit(buf.str(), an_out, out);
  });

  auto* translated = analyze->add_subcommand("translated", "Original vs translated captions");
  common(translated);
  translated->add_option("--lang", an_lang, "Language with original and translated captions")
      ->required();
  bind(translated, "analyze translated", [&](Run& run) {
    run.input(an_corpus);
    const Corpus corpus = load_canonical(an_corpus);
    const auto labels = load_label_files(an_labels, run);
    const Language lang = language_from_code(an_lang);
    std::vector<CorrelationResult> results;
    for (const auto& [prop, l] : labels) {
      const TranslatedAgreement t = translated_agreement(corpus, l, lang);
      results.push_back(t.english_translated);
      results.push_back(t.original_translated);
    }
    std::ostringstream buf;
    write_correlation_csv(results, buf);
    return emit(buf.str(), an_out, out);
  });

  // report
  auto* report = app.add_subcommand("report", "Assemble the summary tables");
  std::string rep_results, rep_out;
  report->add_option("--results", rep_results, "Results directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  report->add_option("--out", rep_out, "Table directory (default: <results>/tables)");
  bind(report, "report", [&](Run& run) {
    const fs::path out_dir = rep_out.empty() ? fs::path(rep_results) / "tables" : fs::path(rep_out);
    for (const char* part : {"prevalence.json", "cv", "agreement"}) {
      const fs::path p = fs::path(rep_results) / part;
      if (fs::exists(p)) run.input(p);
    }
    const auto written = report_tables(rep_results, out_dir);
    for (const auto& w : written) out << w.generic_string() << '\n';
    return std::vector<fs::path>{out_dir};
  });

  // replay
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string replay_manifest;
  replay->add_option("--manifest", replay_manifest)->required()->check(CLI::ExistingFile);
  bool replaying = false;
  replay->callback([&] { replaying = true; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUserError;
  }

  return guarded(
      [&] {
        setup_logging(log_level);
        if (replaying) {
          const RunManifest m = load_manifest(replay_manifest);
          return run(m.argv, out, err);
        }
        Run record(command, args);
        record.config(*active);
        const auto outputs = action(record);
        record.finish(outputs);
        return kExitOk;
      },
      err);
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
}

}  // namespace caplens::cli
