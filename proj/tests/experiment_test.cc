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
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "prosocoref/errors.h"
#include "prosocoref/experiment.h"
#include "prosocoref/synth.h"

using namespace prosocoref;

namespace {

struct SmallCorpus {
  std::vector<Document> train, test;
};

const SmallCorpus &Corpus() {
  static const SmallCorpus corpus = [] {
    GenConfig cfg;
    cfg.n_docs = 40;
    cfg.synthesize_audio = false;
    CorpusSplit s = SplitCorpus(Generate(cfg).docs, 0.75, 0.0);
    return SmallCorpus{s.train, s.test};
  }();
  return corpus;
}

GridConfig SmallGrid() {
  GridConfig g;
  g.epochs = 2;
  return g;
}

int CountLines(const std::string &s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

// Independent binomial tail by direct summation.
double NaiveSignP(int w, int l) {
  const int n = w + l;
  if (n == 0) return 1;
  const int k = std::min(w, l);
  double tail = 0;
  for (int i = 0; i <= k; ++i) {
    double c = 1;
    for (int j = 0; j < i; ++j) c = c * (n - j) / (j + 1);
    tail += c * std::pow(0.5, n);
  }
  return std::min(1.0, 2 * tail);
}

}  // namespace

TEST_CASE("full grid has thirteen rows with one baseline") {
  const auto &c = Corpus();
  auto rows = RunGrid(c.train, c.test, SmallGrid());
  REQUIRE(rows.size() == 13);
  CHECK(rows[0].is_baseline());
  CHECK(std::count_if(rows.begin(), rows.end(),
                      [](const ResultRow &r) { return r.is_baseline(); }) == 1);
  CHECK(rows[1].feature == ProsodyFeature::kAccentPresence);
  CHECK(rows[1].scope == FeatureScope::kShortNp);
  CHECK(rows[1].setting == Setting::kGold);
  CHECK(rows[12].feature == ProsodyFeature::kNuclearPresence);
  CHECK(rows[12].scope == FeatureScope::kAllNp);
  CHECK(rows[12].setting == Setting::kAuto);
  for (const ResultRow &r : rows) {
    REQUIRE(r.conll.size() == 1);
    CHECK(r.mean == r.conll[0]);
    CHECK(r.mean > 0);
    CHECK(r.mean <= 100);
  }

  std::string table = FormatResultTable(rows);
  CHECK(table.rfind("Baseline", 0) == 0);
  CHECK(table.find("+ Pitch accent presence") != std::string::npos);
  CHECK(table.find("+ Nuclear accent presence") != std::string::npos);
  CHECK(table.find("short NPs") != std::string::npos);
  CHECK(table.find("gold/auto") != std::string::npos);
  CHECK(CountLines(table) == 11);

  std::string tsv = FormatResultRows(rows);
  CHECK(CountLines(tsv) == 14);
  CHECK(tsv.find("\nnone\t-\t-\t") != std::string::npos);
  CHECK(ParseResultRows(tsv) == rows);

  // Regeneration is byte-identical.
  CHECK(FormatResultRows(RunGrid(c.train, c.test, SmallGrid())) == tsv);
}

TEST_CASE("gold and gold/auto share a trained model") {
  const auto &c = Corpus();
  GridConfig g = SmallGrid();
  g.features = {ProsodyFeature::kAccentPresence};
  g.scopes = {FeatureScope::kAllNp};
  g.settings = {Setting::kGold, Setting::kGoldAuto};
  auto rows = RunGrid(c.train, c.test, g);
  REQUIRE(rows.size() == 3);

  // Evaluating the gold-trained model on predicted labels by hand.
  std::vector<ProsodyView> views;
  for (const auto &d : c.train) views.push_back(SelectView(d, LabelSource::kGold));
  FeatureConfig fc;
  fc.prosody = ProsodyFeature::kAccentPresence;
  fc.scope = FeatureScope::kAllNp;
  CorefModel m = TrainCoref(c.train, views, fc, g.epochs, g.seeds[0]);
  Partition key, response;
  for (const auto &d : c.test) {
    auto ms = OrderMentions(d);
    auto tree = Decode(m, d, SelectView(d, LabelSource::kPredicted));
    for (auto &ch : GoldPartition(d).chains) key.chains.push_back(ch);
    for (auto &ch : ResponsePartition(d, ms, tree).chains) {
      response.chains.push_back(ch);
    }
  }
  CHECK(rows[2].mean == doctest::Approx(Conll(key, response).conll));
}

TEST_CASE("missing predictions are reported") {
  auto test = Corpus().test;
  test[1].tokens[0].pred_accent.reset();
  GridConfig g = SmallGrid();
  g.settings = {Setting::kAuto};
  CHECK_THROWS_AS(RunGrid(Corpus().train, test, g), InvalidArgument);
}

TEST_CASE("sign test") {
  CHECK(SignTestP(0, 0) == 1.0);
  CHECK(SignTestP(5, 5) == doctest::Approx(1.0));
  CHECK(SignTestP(10, 0) == doctest::Approx(2.0 / 1024));
  for (int w = 0; w < 30; w += 3) {
    for (int l = 0; l < 30; l += 4) {
      CHECK(SignTestP(w, l) == doctest::Approx(NaiveSignP(w, l)));
      CHECK(SignTestP(w, l) == doctest::Approx(SignTestP(l, w)));
    }
  }
}

TEST_CASE("spec parsing") {
  ExperimentSpec spec = ParseExperimentSpec(
      "# grid\n"
      "train = data/train.tsv\n"
      "test = /abs/test.tsv\n"
      "features = nuclear\n"
      "scopes = all, short\n"
      "settings = auto,gold\n"
      "seeds = 1,2,3\n"
      "epochs = 4\n",
      "/base");
  CHECK(spec.train_path == "/base/data/train.tsv");
  CHECK(spec.test_path == "/abs/test.tsv");
  CHECK(spec.dev_path.empty());
  CHECK(spec.grid.features ==
        std::vector<ProsodyFeature>{ProsodyFeature::kNuclearPresence});
  CHECK(spec.grid.scopes ==
        std::vector<FeatureScope>{FeatureScope::kAllNp, FeatureScope::kShortNp});
  CHECK(spec.grid.settings == std::vector<Setting>{Setting::kAuto, Setting::kGold});
  CHECK(spec.grid.seeds == std::vector<uint64_t>{1, 2, 3});
  CHECK(spec.grid.epochs == 4);

  CHECK_THROWS_AS(ParseExperimentSpec("test = t.tsv\n"), ParseError);
  try {
    ParseExperimentSpec("train = a\ntest = b\nsettings = silver\n");
    FAIL("expected an error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(ParseExperimentSpec("train = a\ntest = b\nepochs = 0\n"),
                  ParseError);
  CHECK(ParseSetting("gold/auto") == Setting::kGoldAuto);
  CHECK(TrainSource(Setting::kGoldAuto) == LabelSource::kGold);
  CHECK(TestSource(Setting::kGoldAuto) == LabelSource::kPredicted);
}

TEST_CASE("experiment from files merges dev into training") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "prosocoref_experiment_test";
  fs::create_directories(dir);
  const auto &c = Corpus();
  std::vector<Document> train(c.train.begin(), c.train.begin() + 20);
  std::vector<Document> dev(c.train.begin() + 20, c.train.end());
  SerializeCorpus(train, (dir / "train.tsv").string());
  SerializeCorpus(dev, (dir / "dev.tsv").string());
  SerializeCorpus(c.test, (dir / "test.tsv").string());
  WriteFile((dir / "spec.txt").string(),
            "train = train.tsv\ndev = dev.tsv\ntest = test.tsv\n"
            "features = accent\nscopes = short\nsettings = gold\nepochs = 2\n");
  auto rows = RunExperiment(LoadExperimentSpec((dir / "spec.txt").string()));
  GridConfig g = SmallGrid();
  g.features = {ProsodyFeature::kAccentPresence};
  g.scopes = {FeatureScope::kShortNp};
  g.settings = {Setting::kGold};
  CHECK(rows == RunGrid(c.train, c.test, g));
  fs::remove_all(dir);
}
