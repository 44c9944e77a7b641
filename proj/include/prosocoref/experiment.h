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

// Grid of coreference runs: a prosody-free baseline plus every combination
// of prosodic feature, feature scope and label setting.

#ifndef PROSOCOREF_EXPERIMENT_H_
#define PROSOCOREF_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "prosocoref/coref.h"
#include "prosocoref/corpus.h"

namespace prosocoref {

// Label source used for training and for testing.
enum class Setting { kGold, kGoldAuto, kAuto };

const char *SettingName(Setting s);  // "gold", "gold/auto", "auto"
Setting ParseSetting(const std::string &name);
LabelSource TrainSource(Setting s);
LabelSource TestSource(Setting s);

struct GridConfig {
  std::vector<ProsodyFeature> features = {ProsodyFeature::kAccentPresence,
                                          ProsodyFeature::kNuclearPresence};
  std::vector<FeatureScope> scopes = {FeatureScope::kShortNp,
                                      FeatureScope::kAllNp};
  std::vector<Setting> settings = {Setting::kGold, Setting::kGoldAuto,
                                   Setting::kAuto};
  std::vector<uint64_t> seeds = {1};
  int epochs = 10;
  int short_max_length = kDefaultShortNpMaxLength;
};

struct ExperimentSpec {
  std::string train_path;
  std::string dev_path;  // optional; merged into training data
  std::string test_path;
  GridConfig grid;
};

// Flat "key = value" file. Keys: train, dev, test, features, scopes,
// settings, seeds, epochs, short_max_length. Lists are comma-separated and
// relative paths resolve against the spec file's directory.
ExperimentSpec ParseExperimentSpec(const std::string &text,
                                   const std::string &base_dir = "");
ExperimentSpec LoadExperimentSpec(const std::string &path);

struct ResultRow {
  ProsodyFeature feature = ProsodyFeature::kNone;  // kNone marks the baseline
  FeatureScope scope = FeatureScope::kShortNp;
  Setting setting = Setting::kGold;
  std::vector<double> conll;  // per seed, corpus-level
  double mean = 0;
  // Per-document CoNLL against the baseline, pooled over seeds.
  int wins = 0;
  int losses = 0;
  double sign_p = 1;

  bool is_baseline() const { return feature == ProsodyFeature::kNone; }
  bool operator==(const ResultRow &other) const = default;
};

// Baseline first, then features x scopes x settings in config order.
std::vector<ResultRow> RunGrid(const std::vector<Document> &train,
                               const std::vector<Document> &test,
                               const GridConfig &grid);
std::vector<ResultRow> RunExperiment(const ExperimentSpec &spec);

// Two-sided exact binomial sign test with ties dropped.
double SignTestP(int wins, int losses);

// One block per feature: settings as rows, scopes as columns.
std::string FormatResultTable(const std::vector<ResultRow> &rows);
// Header plus one tab-separated line per row.
std::string FormatResultRows(const std::vector<ResultRow> &rows);
std::vector<ResultRow> ParseResultRows(const std::string &text);

}  // namespace prosocoref

#endif  // PROSOCOREF_EXPERIMENT_H_
