// Copyright 2026 The prosocoref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: corpus generation, prosody detection, nuclear
// accent derivation, coreference training/decoding, scoring and the
// experiment grid.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prosocoref/acoustic.h"
#include "prosocoref/annotation.h"
#include "prosocoref/coref.h"
#include "prosocoref/corpus.h"
#include "prosocoref/detector.h"
#include "prosocoref/errors.h"
#include "prosocoref/experiment.h"
#include "prosocoref/metrics.h"
#include "prosocoref/synth.h"
#include "prosocoref/wav.h"

namespace fs = std::filesystem;
using namespace prosocoref;

namespace {

// Manifest given explicitly, or manifest.tsv beside the corpus.
std::string ResolveManifest(const std::string &explicit_path,
                            const std::string &corpus_path) {
  if (!explicit_path.empty()) return explicit_path;
  fs::path guess = fs::path(corpus_path).parent_path() / "manifest.tsv";
  if (fs::exists(guess)) return guess.string();
  return "";
}

// Frame sequences per document, from a PCF1 cache or from the audio files.
std::vector<FrameSequence> LoadFrames(std::vector<Document> *docs,
                                      const std::string &manifest_path,
                                      const std::string &cache_path) {
  std::vector<FrameSequence> frames(docs->size());
  if (!cache_path.empty()) {
    std::map<std::string, std::vector<FeatureRow>> cached;
    for (auto &entry : DecodeFeatureCache(ReadFile(cache_path))) {
      cached[entry.doc_id] = std::move(entry.rows);
    }
    for (size_t d = 0; d < docs->size(); ++d) {
      auto it = cached.find((*docs)[d].doc_id);
      if (it == cached.end()) {
        throw InvalidArgument("feature cache has no entry for '" +
                              (*docs)[d].doc_id + "'");
      }
      frames[d].normalized = it->second;
    }
    return frames;
  }
  if (manifest_path.empty()) {
    throw InvalidArgument(
        "no audio: pass --audio-manifest or --feature-cache");
  }
  AttachAudio(ReadManifest(manifest_path), docs);
  for (size_t d = 0; d < docs->size(); ++d) {
    const Document &doc = (*docs)[d];
    if (!doc.audio_path) {
      throw InvalidArgument("document '" + doc.doc_id +
                            "' is missing from the audio manifest");
    }
    frames[d] = ExtractFeatures(ReadWav(*doc.audio_path));
  }
  return frames;
}

std::vector<ProsodyView> Views(const std::vector<Document> &docs,
                               LabelSource source) {
  std::vector<ProsodyView> views;
  for (const Document &d : docs) views.push_back(SelectView(d, source));
  return views;
}

void PrintScore(const char *name, const DetectorScore &s) {
  std::printf("%s\taccuracy=%.4f\tevent_accuracy=%.4f\tno_event_accuracy=%.4f"
              "\ttokens=%zu\n",
              name, s.accuracy, s.positive_accuracy, s.negative_accuracy,
              s.count);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Prosody-informed coreference resolution toolkit"};
  app.require_subcommand(1);

  // gen-corpus
  auto *gen = app.add_subcommand("gen-corpus", "Generate a synthetic corpus");
  std::string gen_config, gen_out;
  std::optional<uint64_t> gen_seed;
  gen->add_option("--config", gen_config, "key = value generator config")
      ->check(CLI::ExistingFile);
  gen->add_option("--out-dir", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_seed, "Override the config seed");

  // corrupt-labels
  auto *corrupt = app.add_subcommand(
      "corrupt-labels", "Fill prediction columns with noisy gold labels");
  std::string corrupt_in, corrupt_out;
  double accent_flip = 0.181, boundary_flip = 0.145;
  uint64_t corrupt_seed = 1;
  corrupt->add_option("--corpus", corrupt_in)->required()->check(CLI::ExistingFile);
  corrupt->add_option("--accent-flip", accent_flip, "Accent flip probability");
  corrupt->add_option("--boundary-flip", boundary_flip,
                      "Boundary flip probability");
  corrupt->add_option("--seed", corrupt_seed);
  corrupt->add_option("--out", corrupt_out)->required();

  // extract-features
  auto *extract = app.add_subcommand("extract-features",
                                     "Write a PCF1 feature cache");
  std::string extract_corpus, extract_manifest, extract_out;
  extract->add_option("--corpus", extract_corpus)->required()->check(CLI::ExistingFile);
  extract->add_option("--audio-manifest", extract_manifest);
  extract->add_option("--out", extract_out)->required();

  // train-prosody
  auto *train_p = app.add_subcommand("train-prosody", "Train a CNN detector");
  std::string tp_event = "accent", tp_corpus, tp_manifest, tp_cache, tp_out;
  TrainConfig tp_cfg;
  train_p->add_option("--event", tp_event, "accent or boundary")
      ->check(CLI::IsMember({"accent", "boundary"}));
  train_p->add_option("--corpus", tp_corpus)->required()->check(CLI::ExistingFile);
  train_p->add_option("--audio-manifest", tp_manifest);
  train_p->add_option("--feature-cache", tp_cache)->check(CLI::ExistingFile);
  train_p->add_option("--seed", tp_cfg.seed);
  train_p->add_option("--epochs", tp_cfg.epochs);
  train_p->add_option("--learning-rate", tp_cfg.learning_rate);
  train_p->add_option("--batch-size", tp_cfg.batch_size);
  train_p->add_option("--l2", tp_cfg.l2);
  train_p->add_option("--out", tp_out)->required();

  // predict-prosody
  auto *predict_p = app.add_subcommand("predict-prosody",
                                       "Fill prediction columns from audio");
  std::vector<std::string> pp_models;
  std::string pp_corpus, pp_manifest, pp_cache, pp_out;
  predict_p->add_option("--model", pp_models, "One or more .pmd models")
      ->required()
      ->check(CLI::ExistingFile);
  predict_p->add_option("--corpus", pp_corpus)->required()->check(CLI::ExistingFile);
  predict_p->add_option("--audio-manifest", pp_manifest);
  predict_p->add_option("--feature-cache", pp_cache)->check(CLI::ExistingFile);
  predict_p->add_option("--out", pp_out)->required();

  // eval-prosody
  auto *eval_p = app.add_subcommand("eval-prosody",
                                    "Compare predicted labels to gold labels");
  std::string ep_pred, ep_gold;
  eval_p->add_option("--pred", ep_pred)->required()->check(CLI::ExistingFile);
  eval_p->add_option("--gold", ep_gold)->required()->check(CLI::ExistingFile);

  // derive-nuclear
  auto *nuclear = app.add_subcommand("derive-nuclear",
                                     "Add a nuclear accent column");
  std::string dn_corpus, dn_source = "gold", dn_out;
  nuclear->add_option("--corpus", dn_corpus)->required()->check(CLI::ExistingFile);
  nuclear->add_option("--source", dn_source, "gold or pred");
  nuclear->add_option("--out", dn_out)->required();

  // train-coref
  auto *train_c = app.add_subcommand("train-coref", "Train the resolver");
  std::string tc_corpus, tc_prosody = "none", tc_scope = "short",
                         tc_source = "gold", tc_out;
  int tc_epochs = 10, tc_short = kDefaultShortNpMaxLength;
  uint64_t tc_seed = 1;
  train_c->add_option("--corpus", tc_corpus)->required()->check(CLI::ExistingFile);
  train_c->add_option("--prosody", tc_prosody, "none, accent or nuclear");
  train_c->add_option("--scope", tc_scope, "short or all");
  train_c->add_option("--source", tc_source, "gold or pred");
  train_c->add_option("--short-max-length", tc_short);
  train_c->add_option("--epochs", tc_epochs);
  train_c->add_option("--seed", tc_seed);
  train_c->add_option("--out", tc_out)->required();

  // predict-coref
  auto *predict_c = app.add_subcommand("predict-coref",
                                       "Write predicted chains");
  std::string pc_model, pc_corpus, pc_source = "gold", pc_out;
  predict_c->add_option("--model", pc_model)->required()->check(CLI::ExistingFile);
  predict_c->add_option("--corpus", pc_corpus)->required()->check(CLI::ExistingFile);
  predict_c->add_option("--source", pc_source, "gold or pred");
  predict_c->add_option("--out", pc_out)->required();

  // score
  auto *score = app.add_subcommand("score", "MUC, B3, CEAF_e and CoNLL");
  std::string sc_key, sc_response;
  score->add_option("--key", sc_key)->required()->check(CLI::ExistingFile);
  score->add_option("--response", sc_response)->required()->check(CLI::ExistingFile);

  // run-experiments
  auto *run = app.add_subcommand("run-experiments", "Run the experiment grid");
  std::string re_spec, re_out;
  run->add_option("--spec", re_spec)->required()->check(CLI::ExistingFile);
  run->add_option("--out", re_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      GenConfig cfg = gen_config.empty() ? GenConfig{}
                                         : ParseGenConfig(ReadFile(gen_config));
      if (gen_seed) cfg.seed = *gen_seed;
      GeneratedCorpus corpus = Generate(cfg);
      WriteGeneratedCorpus(cfg, corpus, gen_out);
      std::printf("wrote %zu documents to %s\n", corpus.docs.size(),
                  gen_out.c_str());
    } else if (*corrupt) {
      std::vector<Document> docs = ParseCorpus(corrupt_in);
      CorruptLabels(&docs, accent_flip, boundary_flip, corrupt_seed);
      SerializeCorpus(docs, corrupt_out);
    } else if (*extract) {
      std::vector<Document> docs = ParseCorpus(extract_corpus);
      auto frames = LoadFrames(
          &docs, ResolveManifest(extract_manifest, extract_corpus), "");
      std::vector<CachedFeatures> entries;
      for (size_t d = 0; d < docs.size(); ++d) {
        entries.push_back({docs[d].doc_id, frames[d].normalized});
      }
      WriteFile(extract_out, EncodeFeatureCache(entries));
    } else if (*train_p) {
      std::vector<Document> docs = ParseCorpus(tp_corpus);
      auto frames =
          LoadFrames(&docs, ResolveManifest(tp_manifest, tp_corpus), tp_cache);
      const EventKind event = ParseEventKind(tp_event);
      std::vector<LabeledWindow> data;
      for (size_t d = 0; d < docs.size(); ++d) {
        auto ranges = TokenFrameRanges(docs[d], frames[d]);
        int mean = MeanWordFrames(ranges);
        for (size_t t = 0; t < docs[d].tokens.size(); ++t) {
          const Token &tok = docs[d].tokens[t];
          data.push_back(
              {BuildWindow(frames[d], ranges, mean, static_cast<int>(t)),
               event == EventKind::kAccent ? tok.gold_accent
                                           : tok.gold_boundary});
        }
      }
      std::vector<double> losses;
      ProsodyModel model = TrainDetector(data, tp_cfg, event, {}, &losses);
      SaveProsodyModel(model, tp_out);
      for (size_t e = 0; e < losses.size(); ++e) {
        std::printf("epoch %zu\tloss=%.6f\n", e + 1, losses[e]);
      }
    } else if (*predict_p) {
      std::vector<Document> docs = ParseCorpus(pp_corpus);
      auto frames =
          LoadFrames(&docs, ResolveManifest(pp_manifest, pp_corpus), pp_cache);
      for (const std::string &path : pp_models) {
        ProsodyModel model = LoadProsodyModel(path);
        for (size_t d = 0; d < docs.size(); ++d) {
          PredictDocument(model, &docs[d], frames[d]);
        }
      }
      SerializeCorpus(docs, pp_out);
    } else if (*eval_p) {
      std::vector<Document> pred = ParseCorpus(ep_pred);
      std::vector<Document> gold = ParseCorpus(ep_gold);
      if (pred.size() != gold.size()) {
        throw InvalidArgument("corpora differ in document count");
      }
      std::vector<bool> pa, ga, pb, gb;
      bool have_accent = true, have_boundary = true;
      for (size_t d = 0; d < pred.size(); ++d) {
        if (pred[d].tokens.size() != gold[d].tokens.size()) {
          throw InvalidArgument("document '" + gold[d].doc_id +
                                "' differs in token count");
        }
        for (size_t t = 0; t < gold[d].tokens.size(); ++t) {
          const Token &p = pred[d].tokens[t], &g = gold[d].tokens[t];
          have_accent = have_accent && p.pred_accent.has_value();
          have_boundary = have_boundary && p.pred_boundary.has_value();
          pa.push_back(p.pred_accent.value_or(false));
          pb.push_back(p.pred_boundary.value_or(false));
          ga.push_back(g.gold_accent);
          gb.push_back(g.gold_boundary);
        }
      }
      if (!have_accent && !have_boundary) {
        throw InvalidArgument("prediction corpus has no predicted labels");
      }
      if (have_accent) PrintScore("accent", EvaluateDetector(pa, ga));
      if (have_boundary) PrintScore("boundary", EvaluateDetector(pb, gb));
    } else if (*nuclear) {
      WriteFile(dn_out, NuclearReport(ParseCorpus(dn_corpus),
                                      ParseLabelSource(dn_source)));
    } else if (*train_c) {
      std::vector<Document> docs = ParseCorpus(tc_corpus);
      FeatureConfig cfg;
      cfg.prosody = ParseProsodyFeature(tc_prosody);
      cfg.scope = ParseFeatureScope(tc_scope);
      cfg.label_source = ParseLabelSource(tc_source);
      cfg.short_max_length = tc_short;
      std::vector<ProsodyView> views;
      if (cfg.prosody != ProsodyFeature::kNone) {
        views = Views(docs, cfg.label_source);
      }
      CorefTrainStats stats;
      CorefModel model =
          TrainCoref(docs, views, cfg, tc_epochs, tc_seed, &stats);
      SaveCorefModel(model, tc_out);
      for (size_t e = 0; e < stats.arc_errors.size(); ++e) {
        std::printf("epoch %zu\tarc_errors=%d\tupdates=%d\n", e + 1,
                    stats.arc_errors[e], stats.updates[e]);
      }
    } else if (*predict_c) {
      CorefModel model = LoadCorefModel(pc_model);
      std::vector<Document> docs = ParseCorpus(pc_corpus);
      LabelSource source = ParseLabelSource(pc_source);
      if (model.config.prosody == ProsodyFeature::kNone) {
        source = LabelSource::kGold;
      }
      std::vector<Document> out;
      for (const Document &doc : docs) {
        ProsodyView view = SelectView(doc, source);
        AntecedentTree tree = Decode(model, doc, view);
        out.push_back(WithPredictedChains(doc, OrderMentions(doc), tree));
      }
      SerializeCorpus(out, pc_out);
    } else if (*score) {
      std::vector<Document> key = ParseCorpus(sc_key);
      std::vector<Document> response = ParseCorpus(sc_response);
      MetricReport report =
          Conll(GoldPartition(key), GoldPartition(response));
      std::cout << FormatReport(report) << FormatReportLine(report) << "\n";
    } else if (*run) {
      std::vector<ResultRow> rows = RunExperiment(LoadExperimentSpec(re_spec));
      std::string table = FormatResultTable(rows);
      WriteFile(re_out, table);
      WriteFile(re_out + ".rows.tsv", FormatResultRows(rows));
      std::cout << table;
    }
  } catch (const Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
