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

#include "prosocoref/experiment.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <tuple>

#include "prosocoref/errors.h"
#include "prosocoref/metrics.h"

namespace prosocoref {

namespace {

std::string Trim(std::string s) {
  const char *ws = " \t\r";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

std::vector<std::string> SplitList(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T ParseNumber(const std::string &s, const std::string &what) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(what + ": bad number '" + s + "'");
  }
  return value;
}

std::vector<ProsodyView> Views(const std::vector<Document> &docs,
                               LabelSource source) {
  std::vector<ProsodyView> views;
  views.reserve(docs.size());
  for (const Document &d : docs) views.push_back(SelectView(d, source));
  return views;
}

// Response partition and per-document CoNLL for a trained model.
struct Evaluation {
  double conll = 0;
  std::vector<double> per_doc;
};

Evaluation Evaluate(const CorefModel &model, const std::vector<Document> &test,
                    const std::vector<ProsodyView> &views) {
  Evaluation ev;
  Partition key, response;
  for (size_t d = 0; d < test.size(); ++d) {
    AntecedentTree tree = Decode(model, test[d], views[d]);
    Partition doc_key = GoldPartition(test[d]);
    Partition doc_response =
        ResponsePartition(test[d], OrderMentions(test[d]), tree);
    ev.per_doc.push_back(Conll(doc_key, doc_response).conll);
    for (auto &c : doc_key.chains) key.chains.push_back(std::move(c));
    for (auto &c : doc_response.chains) response.chains.push_back(std::move(c));
  }
  ev.conll = Conll(key, response).conll;
  return ev;
}

double Mean(const std::vector<double> &v) {
  if (v.empty()) return 0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

const char *FeatureTitle(ProsodyFeature f) {
  switch (f) {
    case ProsodyFeature::kAccentPresence:
      return "+ Pitch accent presence";
    case ProsodyFeature::kNuclearPresence:
      return "+ Nuclear accent presence";
    case ProsodyFeature::kNone:
      break;
  }
  return "Baseline";
}

std::string JoinDoubles(const std::vector<double> &v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += FormatDouble(v[i]);
  }
  return out;
}

}  // namespace

const char *SettingName(Setting s) {
  switch (s) {
    case Setting::kGold:
      return "gold";
    case Setting::kGoldAuto:
      return "gold/auto";
    case Setting::kAuto:
      return "auto";
  }
  return "gold";
}

Setting ParseSetting(const std::string &name) {
  if (name == "gold") return Setting::kGold;
  if (name == "gold/auto") return Setting::kGoldAuto;
  if (name == "auto") return Setting::kAuto;
  throw InvalidArgument("unknown setting '" + name + "'");
}

LabelSource TrainSource(Setting s) {
  return s == Setting::kAuto ? LabelSource::kPredicted : LabelSource::kGold;
}

LabelSource TestSource(Setting s) {
  return s == Setting::kGold ? LabelSource::kGold : LabelSource::kPredicted;
}

ExperimentSpec ParseExperimentSpec(const std::string &text,
                                   const std::string &base_dir) {
  ExperimentSpec spec;
  auto resolve = [&base_dir](const std::string &p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base_dir.empty()) {
      path = std::filesystem::path(base_dir) / path;
    }
    return path.string();
  };
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = Trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    try {
      if (key == "train") {
        spec.train_path = resolve(value);
      } else if (key == "dev") {
        spec.dev_path = resolve(value);
      } else if (key == "test") {
        spec.test_path = resolve(value);
      } else if (key == "features") {
        spec.grid.features.clear();
        for (const auto &f : SplitList(value, ',')) {
          ProsodyFeature pf = ParseProsodyFeature(f);
          if (pf != ProsodyFeature::kNone) spec.grid.features.push_back(pf);
        }
      } else if (key == "scopes") {
        spec.grid.scopes.clear();
        for (const auto &s : SplitList(value, ',')) {
          spec.grid.scopes.push_back(ParseFeatureScope(s));
        }
      } else if (key == "settings") {
        spec.grid.settings.clear();
        for (const auto &s : SplitList(value, ',')) {
          spec.grid.settings.push_back(ParseSetting(s));
        }
      } else if (key == "seeds") {
        spec.grid.seeds.clear();
        for (const auto &s : SplitList(value, ',')) {
          spec.grid.seeds.push_back(ParseNumber<uint64_t>(s, "seeds"));
        }
      } else if (key == "epochs") {
        spec.grid.epochs = ParseNumber<int>(value, "epochs");
      } else if (key == "short_max_length") {
        spec.grid.short_max_length = ParseNumber<int>(value, "short_max_length");
      } else {
        throw ParseError("unknown key '" + key + "'");
      }
    } catch (const Error &e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (spec.train_path.empty()) throw ParseError("spec lacks a train corpus");
  if (spec.test_path.empty()) throw ParseError("spec lacks a test corpus");
  if (spec.grid.seeds.empty()) throw ParseError("spec lists no seeds");
  if (spec.grid.epochs < 1) throw ParseError("epochs must be >= 1");
  return spec;
}

ExperimentSpec LoadExperimentSpec(const std::string &path) {
  return ParseExperimentSpec(
      ReadFile(path), std::filesystem::path(path).parent_path().string());
}

std::vector<ResultRow> RunGrid(const std::vector<Document> &train,
                               const std::vector<Document> &test,
                               const GridConfig &grid) {
  if (grid.seeds.empty()) throw InvalidArgument("no seeds given");
  bool needs_pred_train = false, needs_pred_test = false;
  for (Setting s : grid.settings) {
    needs_pred_train |= TrainSource(s) == LabelSource::kPredicted;
    needs_pred_test |= TestSource(s) == LabelSource::kPredicted;
  }
  if (grid.features.empty()) needs_pred_train = needs_pred_test = false;

  const std::vector<ProsodyView> train_gold = Views(train, LabelSource::kGold);
  const std::vector<ProsodyView> test_gold = Views(test, LabelSource::kGold);
  std::vector<ProsodyView> train_pred, test_pred;
  try {
    if (needs_pred_train) train_pred = Views(train, LabelSource::kPredicted);
    if (needs_pred_test) test_pred = Views(test, LabelSource::kPredicted);
  } catch (const InvalidArgument &e) {
    throw InvalidArgument(std::string("settings with automatic labels need "
                                      "prediction columns: ") +
                          e.what());
  }
  auto views_for = [&](bool training, LabelSource source)
      -> const std::vector<ProsodyView> & {
    if (source == LabelSource::kGold) return training ? train_gold : test_gold;
    return training ? train_pred : test_pred;
  };

  std::vector<ResultRow> rows;
  rows.push_back({});
  for (ProsodyFeature f : grid.features) {
    for (FeatureScope scope : grid.scopes) {
      for (Setting s : grid.settings) {
        ResultRow row;
        row.feature = f;
        row.scope = scope;
        row.setting = s;
        rows.push_back(row);
      }
    }
  }

  for (uint64_t seed : grid.seeds) {
    FeatureConfig base_cfg;
    base_cfg.short_max_length = grid.short_max_length;
    CorefModel baseline =
        TrainCoref(train, train_gold, base_cfg, grid.epochs, seed);
    Evaluation base_eval = Evaluate(baseline, test, test_gold);
    rows[0].conll.push_back(base_eval.conll);

    // gold and gold/auto share a model trained on gold labels.
    std::map<std::tuple<ProsodyFeature, FeatureScope, LabelSource>, CorefModel>
        models;
    for (size_t r = 1; r < rows.size(); ++r) {
      ResultRow &row = rows[r];
      FeatureConfig cfg;
      cfg.prosody = row.feature;
      cfg.scope = row.scope;
      cfg.label_source = TrainSource(row.setting);
      cfg.short_max_length = grid.short_max_length;
      auto key = std::make_tuple(row.feature, row.scope, cfg.label_source);
      auto it = models.find(key);
      if (it == models.end()) {
        it = models
                 .emplace(key, TrainCoref(train, views_for(true, cfg.label_source),
                                          cfg, grid.epochs, seed))
                 .first;
      }
      Evaluation ev =
          Evaluate(it->second, test, views_for(false, TestSource(row.setting)));
      row.conll.push_back(ev.conll);
      for (size_t d = 0; d < test.size(); ++d) {
        if (ev.per_doc[d] > base_eval.per_doc[d]) ++row.wins;
        if (ev.per_doc[d] < base_eval.per_doc[d]) ++row.losses;
      }
    }
  }
  for (ResultRow &row : rows) {
    row.mean = Mean(row.conll);
    row.sign_p = SignTestP(row.wins, row.losses);
  }
  return rows;
}

std::vector<ResultRow> RunExperiment(const ExperimentSpec &spec) {
  std::vector<Document> train = ParseCorpus(spec.train_path);
  if (!spec.dev_path.empty()) {
    for (Document &d : ParseCorpus(spec.dev_path)) train.push_back(std::move(d));
  }
  return RunGrid(train, ParseCorpus(spec.test_path), spec.grid);
}

double SignTestP(int wins, int losses) {
  const int n = wins + losses;
  if (n == 0) return 1.0;
  const int k = std::min(wins, losses);
  double tail = 0;
  for (int i = 0; i <= k; ++i) {
    double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                      std::lgamma(n - i + 1.0) - n * std::log(2.0);
    tail += std::exp(log_term);
  }
  return std::min(1.0, 2 * tail);
}

std::string FormatResultTable(const std::vector<ResultRow> &rows) {
  std::string out;
  char buf[256];
  std::vector<ProsodyFeature> features;
  std::vector<FeatureScope> scopes;
  std::vector<Setting> settings;
  for (const ResultRow &r : rows) {
    if (r.is_baseline()) {
      std::snprintf(buf, sizeof(buf), "%-28s %9.2f\n", "Baseline", r.mean);
      out += buf;
      continue;
    }
    auto add = [](auto &v, auto x) {
      if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
    };
    add(features, r.feature);
    add(scopes, r.scope);
    add(settings, r.setting);
  }
  for (ProsodyFeature f : features) {
    std::snprintf(buf, sizeof(buf), "\n%-28s", FeatureTitle(f));
    out += buf;
    for (FeatureScope s : scopes) {
      std::snprintf(buf, sizeof(buf), " %9s",
                    s == FeatureScope::kShortNp ? "short NPs" : "all NPs");
      out += buf;
    }
    out += "\n";
    for (Setting setting : settings) {
      std::snprintf(buf, sizeof(buf), "  %-26s", SettingName(setting));
      out += buf;
      for (FeatureScope s : scopes) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const ResultRow &r) {
          return r.feature == f && r.scope == s && r.setting == setting;
        });
        if (it == rows.end()) {
          std::snprintf(buf, sizeof(buf), " %9s", "-");
        } else {
          std::snprintf(buf, sizeof(buf), " %9.2f", it->mean);
        }
        out += buf;
      }
      out += "\n";
    }
  }
  return out;
}

std::string FormatResultRows(const std::vector<ResultRow> &rows) {
  std::string out =
      "feature\tscope\tsetting\tconll_mean\tconll_per_seed\twins\tlosses\t"
      "sign_p\n";
  for (const ResultRow &r : rows) {
    out += ProsodyFeatureName(r.feature);
    out += '\t';
    out += r.is_baseline() ? "-" : FeatureScopeName(r.scope);
    out += '\t';
    out += r.is_baseline() ? "-" : SettingName(r.setting);
    out += '\t' + FormatDouble(r.mean) + '\t' + JoinDoubles(r.conll) + '\t' +
           std::to_string(r.wins) + '\t' + std::to_string(r.losses) + '\t' +
           FormatDouble(r.sign_p) + '\n';
  }
  return out;
}

std::vector<ResultRow> ParseResultRows(const std::string &text) {
  std::vector<ResultRow> rows;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line.rfind("feature\t", 0) != 0) {
        throw ParseError("missing result header", lineno);
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, '\t')) cols.push_back(field);
    if (cols.size() != 8) {
      throw ParseError("expected 8 columns, got " + std::to_string(cols.size()),
                       lineno);
    }
    try {
      ResultRow r;
      r.feature = ParseProsodyFeature(cols[0]);
      if (!r.is_baseline()) {
        r.scope = ParseFeatureScope(cols[1]);
        r.setting = ParseSetting(cols[2]);
      }
      r.mean = ParseNumber<double>(cols[3], "conll_mean");
      for (const auto &v : SplitList(cols[4], ',')) {
        r.conll.push_back(ParseNumber<double>(v, "conll_per_seed"));
      }
      r.wins = ParseNumber<int>(cols[5], "wins");
      r.losses = ParseNumber<int>(cols[6], "losses");
      r.sign_p = ParseNumber<double>(cols[7], "sign_p");
      rows.push_back(std::move(r));
    } catch (const Error &e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return rows;
}

}  // namespace prosocoref
