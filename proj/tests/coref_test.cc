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

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "prosocoref/coref.h"
#include "prosocoref/errors.h"
#include "prosocoref/synth.h"

using namespace prosocoref;

namespace {

const std::vector<std::string> kNames = {"Anna", "Berlin", "Carl", "Dora",
                                         "Emil", "Fritz"};

// One-token name mentions separated by verbs; same name, same entity.
Document NameDoc(uint64_t seed, int n_mentions) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(kNames.size()) - 1);
  Document d;
  d.doc_id = "toy" + std::to_string(seed);
  double t = 0;
  for (int m = 0; m < n_mentions; ++m) {
    const int name = pick(rng);
    for (const std::string &form : {kNames[name], std::string("sleeps")}) {
      Token tok;
      tok.doc_id = d.doc_id;
      tok.sent_idx = m / 2;
      tok.tok_idx = static_cast<int>(d.tokens.size());
      tok.form = form;
      tok.pos = form == "sleeps" ? "VB" : "NE";
      tok.start_time = t;
      tok.end_time = t + 0.2;
      t += 0.2;
      d.tokens.push_back(tok);
    }
    const int at = static_cast<int>(d.tokens.size()) - 2;
    d.nps.push_back({at, at, name});
  }
  // Renumber tokens within sentences.
  int prev_sent = -1, idx = 0;
  for (Token &tok : d.tokens) {
    if (tok.sent_idx != prev_sent) idx = 0;
    prev_sent = tok.sent_idx;
    tok.tok_idx = idx++;
  }
  return d;
}

std::vector<ProsodyView> GoldViews(const std::vector<Document> &docs) {
  std::vector<ProsodyView> v;
  for (const Document &d : docs) v.push_back(SelectView(d, LabelSource::kGold));
  return v;
}

bool Has(const std::vector<std::string> &v, const std::string &s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_CASE("mention order") {
  Document d;
  d.tokens.resize(6);
  d.nps = {{3, 3, 1}, {0, 2, 0}, {0, 0, 2}, {4, 5, 1}};
  auto ms = OrderMentions(d);
  REQUIRE(ms.size() == 4);
  CHECK(ms[0].np_index == 1);
  CHECK(ms[1].np_index == 2);
  CHECK(ms[2].np_index == 0);
  CHECK(ms[3].np_index == 3);
  for (int i = 0; i < 4; ++i) CHECK(ms[i].rank == i);
}

TEST_CASE("decode tie rules") {
  DocumentArcs arcs;
  arcs.mentions = {{0, 0}, {1, 1}, {2, 2}};
  // Feature 0 fires everywhere; feature 1 only on the arcs 2 -> 0, 2 -> 1.
  arcs.arcs = {{{0}}, {{0}, {0}}, {{0}, {0, 1}, {0, 1}}};
  std::vector<double> w = {1.0, 0.0};
  CHECK(DecodeArcs(w, arcs).parent == std::vector<int>{kRoot, kRoot, kRoot});
  w[1] = 0.5;
  CHECK(DecodeArcs(w, arcs).parent == std::vector<int>{kRoot, kRoot, 0});
  w[1] = -0.5;
  CHECK(DecodeArcs(w, arcs).parent == std::vector<int>{kRoot, kRoot, kRoot});
}

TEST_CASE("hand-set EXACT weight links repeated names") {
  Document d = NameDoc(1, 8);
  CorefModel model;
  const int exact = model.registry.Intern("EXACT=1");
  model.registry.Intern("ROOT");
  model.weights = {1.0, 0.0};
  model.averaged_weights = model.weights;
  AntecedentTree tree = Decode(model, d, {});
  auto ms = OrderMentions(d);
  for (size_t i = 0; i < ms.size(); ++i) {
    const std::string &form = d.tokens[d.nps[ms[i].np_index].start].form;
    int first = -1;
    for (size_t j = 0; j < i; ++j) {
      if (d.tokens[d.nps[ms[j].np_index].start].form == form) {
        first = static_cast<int>(j);
        break;
      }
    }
    CHECK(tree.parent[i] == first);
  }
  CHECK(exact == 0);
}

TEST_CASE("pair features") {
  Document d = NameDoc(2, 3);
  d.tokens[0].form = "it";
  d.tokens[0].pos = "PRP";
  auto ms = OrderMentions(d);
  FeatureConfig cfg;
  auto root = PairFeatures(d, {}, ms, 0, kRoot, cfg);
  CHECK(Has(root, "ROOT"));
  CHECK(Has(root, "ROOT|PRON=1"));
  CHECK(Has(root, "ROOT|HPOS=PRP|PRON=1"));
  auto pair = PairFeatures(d, {}, ms, 2, 0, cfg);
  CHECK(Has(pair, "MDIST=2"));
  CHECK(Has(pair, "SDIST=1"));
  CHECK_FALSE(Has(pair, "PROS=0"));
  CHECK_THROWS_AS(PairFeatures(d, {}, ms, 1, 1, cfg), InvalidArgument);
}

TEST_CASE("prosody features respect the short-NP gate") {
  Document d = NameDoc(3, 2);
  // Widen the second mention to four tokens.
  d.tokens[2].pos = "JJ";
  d.nps[1] = {0, 3, 5};
  d.tokens[1].gold_accent = true;
  ProsodyView view = SelectView(d, LabelSource::kGold);
  auto ms = OrderMentions(d);

  FeatureConfig cfg;
  cfg.prosody = ProsodyFeature::kAccentPresence;
  cfg.scope = FeatureScope::kShortNp;
  // ms[0] is the long span, ms[1] the one-token name inside it.
  auto long_root = PairFeatures(d, view, ms, 0, kRoot, cfg);
  CHECK_FALSE(Has(long_root, "ROOT|PROS=1"));
  CHECK_FALSE(Has(long_root, "ROOT|PROS=0"));
  auto short_pair = PairFeatures(d, view, ms, 1, 0, cfg);
  CHECK(Has(short_pair, "PROS=0"));
  CHECK(Has(short_pair, "PROS=0|EXACT=0"));

  cfg.scope = FeatureScope::kAllNp;
  long_root = PairFeatures(d, view, ms, 0, kRoot, cfg);
  CHECK(Has(long_root, "ROOT|PROS=1"));

  cfg.prosody = ProsodyFeature::kNuclearPresence;
  CHECK(Has(PairFeatures(d, view, ms, 0, kRoot, cfg), "ROOT|PROS=1"));
}

TEST_CASE("separable toy corpus is learned without errors") {
  std::vector<Document> docs;
  for (uint64_t s = 1; s <= 20; ++s) docs.push_back(NameDoc(s, 12));
  CorefTrainStats stats;
  CorefModel model = TrainCoref(docs, {}, {}, 5, 7, &stats);
  REQUIRE(stats.arc_errors.size() == 5);
  CHECK(stats.arc_errors.back() == 0);
  CHECK(stats.updates.back() == 0);

  for (uint64_t s = 100; s < 105; ++s) {
    Document d = NameDoc(s, 12);
    auto ms = OrderMentions(d);
    auto tree = Decode(model, d, {});
    Document predicted = WithPredictedChains(d, ms, tree);
    CHECK(GoldChains(predicted).size() == GoldChains(d).size());
    CHECK(Conll(GoldPartition(d), ResponsePartition(d, ms, tree)).conll ==
          doctest::Approx(100.0));
  }

  // Same seed, same model.
  CHECK(TrainCoref(docs, {}, {}, 5, 7) == model);
}

TEST_CASE("scaling the weights does not change the decode") {
  std::vector<Document> docs;
  for (uint64_t s = 1; s <= 10; ++s) docs.push_back(NameDoc(s, 10));
  docs[0].tokens[0].gold_accent = true;
  FeatureConfig cfg;
  cfg.prosody = ProsodyFeature::kAccentPresence;
  CorefModel model = TrainCoref(docs, GoldViews(docs), cfg, 2, 3);
  CorefModel scaled = model;
  for (double &w : scaled.averaged_weights) w *= 3.5;
  for (const Document &d : docs) {
    ProsodyView v = SelectView(d, LabelSource::kGold);
    CHECK(Decode(model, d, v) == Decode(scaled, d, v));
  }
}

TEST_CASE("training rejects bad input") {
  std::vector<Document> docs = {NameDoc(1, 4)};
  CHECK_THROWS_AS(TrainCoref(docs, {}, {}, 0, 1), InvalidArgument);
  FeatureConfig cfg;
  cfg.prosody = ProsodyFeature::kNuclearPresence;
  CHECK_THROWS_AS(TrainCoref(docs, {}, cfg, 1, 1), InvalidArgument);
  for (auto &np : docs[0].nps) np.chain_id.reset();
  CHECK_THROWS_AS(TrainCoref(docs, {}, {}, 1, 1), InvalidArgument);
}

TEST_CASE("chains from random trees") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 25;
    AntecedentTree tree;
    for (int i = 0; i < n; ++i) {
      std::uniform_int_distribution<int> p(-1, i - 1);
      tree.parent.push_back(p(rng));
    }
    auto chains = ChainsFromTree(tree);
    std::vector<int> chain_of(n, -1);
    int covered = 0;
    for (size_t c = 0; c < chains.size(); ++c) {
      CHECK(std::is_sorted(chains[c].begin(), chains[c].end()));
      if (c > 0) CHECK(chains[c - 1].front() < chains[c].front());
      for (int m : chains[c]) chain_of[m] = static_cast<int>(c), ++covered;
    }
    CHECK(covered == n);
    for (int i = 0; i < n; ++i) {
      if (tree.parent[i] == kRoot) {
        CHECK(chains[chain_of[i]].front() == i);
      } else {
        CHECK(chain_of[i] == chain_of[tree.parent[i]]);
      }
    }
  }
  CHECK_THROWS_AS(ChainsFromTree({{kRoot, 1}}), InvalidArgument);
}

TEST_CASE("model file round trip") {
  std::vector<Document> docs;
  for (uint64_t s = 1; s <= 5; ++s) docs.push_back(NameDoc(s, 8));
  FeatureConfig cfg;
  cfg.prosody = ProsodyFeature::kNuclearPresence;
  cfg.scope = FeatureScope::kAllNp;
  cfg.label_source = LabelSource::kPredicted;
  cfg.short_max_length = 2;
  CorefModel model = TrainCoref(docs, GoldViews(docs), cfg, 3, 1);
  std::string bytes = EncodeCorefModel(model);
  CHECK(bytes.substr(0, 4) == "CRM1");
  CHECK(DecodeCorefModel(bytes) == model);
  CHECK_THROWS_AS(DecodeCorefModel(bytes.substr(0, bytes.size() / 2)),
                  ParseError);
  const std::string path =
      (std::filesystem::temp_directory_path() / "prosocoref_model.crm")
          .string();
  SaveCorefModel(model, path);
  CHECK(LoadCorefModel(path) == model);
  std::filesystem::remove(path);

  CHECK(ParseProsodyFeature("accent") == ProsodyFeature::kAccentPresence);
  CHECK(std::string(FeatureScopeName(FeatureScope::kAllNp)) == "all");
  CHECK_THROWS(ParseFeatureScope("medium"));
}

TEST_CASE("scores are sparse dot products") {
  std::vector<double> w = {2.0, -1.0, 0.5};
  CHECK(Score(w, {}) == 0.0);
  CHECK(Score(w, {0}) == 2.0);
  CHECK(Score(w, {0, 2}) == Score(w, {0}) + Score(w, {2}));
  CHECK(Score(w, {7}) == 0.0);  // unknown ids score nothing
}

TEST_CASE("zero model and simple trees") {
  Document d = NameDoc(4, 6);
  CorefModel zero;
  AntecedentTree tree = Decode(zero, d, {});
  CHECK(tree.parent == std::vector<int>(6, kRoot));
  CHECK(ChainsFromTree(tree).size() == 6);
  CHECK(Decode(zero, NameDoc(4, 1), {}).parent == std::vector<int>{kRoot});
  auto chains = ChainsFromTree({{kRoot, 0, 1}});
  REQUIRE(chains.size() == 1);
  CHECK(chains[0] == std::vector<int>{0, 1, 2});
}

TEST_CASE("short scope never emits PROS for long NPs") {
  GenConfig g;
  g.n_docs = 30;
  g.synthesize_audio = false;
  for (const Document &d : Generate(g).docs) {
    ProsodyView v = SelectView(d, LabelSource::kPredicted);
    auto ms = OrderMentions(d);
    FeatureConfig cfg;
    cfg.prosody = ProsodyFeature::kNuclearPresence;
    cfg.scope = FeatureScope::kShortNp;
    for (int i = 0; i < static_cast<int>(ms.size()); ++i) {
      const bool is_long = d.nps[ms[i].np_index].length() >= 4;
      for (int j = kRoot; j < i; ++j) {
        for (const std::string &f : PairFeatures(d, v, ms, i, j, cfg)) {
          if (f.find("PROS=") != std::string::npos) CHECK_FALSE(is_long);
        }
      }
    }
  }
}
