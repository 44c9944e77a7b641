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

#include "prosocoref/coref.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "binary_io.h"
#include "prosocoref/errors.h"

namespace prosocoref {

namespace {

const std::set<std::string> kPronounTags = {"PRP",   "PRP$", "PPER", "PPOSAT",
                                            "PPOSS", "PDS",  "PRF",  "PRELS"};
const std::set<std::string> kDefinite = {"the", "this", "that", "these",
                                         "those", "der", "die", "das",
                                         "dem",  "den",  "des"};
const std::set<std::string> kIndefinite = {"a",     "an",    "ein",  "eine",
                                           "einen", "einem", "einer"};

std::string Lower(std::string s) {
  for (char &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Per-mention properties reused across all arcs of a document.
struct MentionInfo {
  std::string surface;
  std::string lower;
  std::string head;
  std::string head_pos;
  bool pronoun = false;
  std::string definiteness;
  std::string length_bucket;
  int sentence = 0;
  const NounPhrase *np = nullptr;
};

MentionInfo Describe(const Document &doc, const NounPhrase &np) {
  MentionInfo info;
  info.np = &np;
  int head = np.end;
  for (int i = np.end; i >= np.start; --i) {
    if (!doc.tokens[i].pos.empty() && doc.tokens[i].pos[0] == 'N') {
      head = i;
      break;
    }
  }
  for (int i = np.start; i <= np.end; ++i) {
    if (i > np.start) info.surface += ' ';
    info.surface += doc.tokens[i].form;
  }
  info.lower = Lower(info.surface);
  info.head = Lower(doc.tokens[head].form);
  info.head_pos = doc.tokens[head].pos;
  info.pronoun = kPronounTags.count(info.head_pos) > 0;
  std::string first = Lower(doc.tokens[np.start].form);
  if (info.pronoun) {
    info.definiteness = "pron";
  } else if (kDefinite.count(first)) {
    info.definiteness = "def";
  } else if (kIndefinite.count(first)) {
    info.definiteness = "indef";
  } else {
    info.definiteness = "none";
  }
  int len = np.length();
  info.length_bucket = len >= 4 ? "4+" : std::to_string(len);
  info.sentence = doc.tokens[np.start].sent_idx;
  return info;
}

std::string MentionDistanceBucket(int d) {
  if (d <= 3) return std::to_string(d);
  return d <= 7 ? "4-7" : "8+";
}

std::string SentenceDistanceBucket(int d) {
  return d >= 3 ? "3+" : std::to_string(d);
}

const char *Bit(bool b) { return b ? "1" : "0"; }

// Prosodic bit of the anaphor, or nullopt when the feature is off or gated.
std::optional<bool> ProsodyBit(const NounPhrase &np, const ProsodyView &view,
                               const FeatureConfig &cfg) {
  if (cfg.prosody == ProsodyFeature::kNone) return std::nullopt;
  NPFeatures f = ComputeNpFeatures(np, view, cfg.short_max_length);
  if (cfg.scope == FeatureScope::kShortNp && !f.is_short) return std::nullopt;
  return cfg.prosody == ProsodyFeature::kAccentPresence ? f.accent_presence
                                                        : f.nuclear_presence;
}

std::vector<std::string> ArcFeatures(const MentionInfo &ana,
                                     const MentionInfo *ant, int rank_distance,
                                     std::optional<bool> prosody) {
  std::vector<std::string> base;
  std::string exact;
  if (ant == nullptr) {
    base = {"ROOT",
            "ROOT|DEF=" + ana.definiteness,
            "ROOT|LEN=" + ana.length_bucket,
            "ROOT|HPOS=" + ana.head_pos};
  } else {
    exact = Bit(ana.surface == ant->surface);
    base = {"EXACT=" + exact,
            std::string("ICASE=") + Bit(ana.lower == ant->lower),
            std::string("HEAD=") + Bit(ana.head == ant->head),
            "DEF=" + ana.definiteness,
            "LEN=" + ana.length_bucket,
            "MDIST=" + MentionDistanceBucket(rank_distance),
            "SDIST=" + SentenceDistanceBucket(ana.sentence - ant->sentence),
            "HPOS=" + ant->head_pos + "_" + ana.head_pos};
  }
  std::vector<std::string> out = base;
  const std::string pron = std::string("|PRON=") + Bit(ana.pronoun);
  out.push_back(std::string(ant ? "" : "ROOT|") + "PRON=" + Bit(ana.pronoun));
  for (const std::string &f : base) out.push_back(f + pron);
  if (prosody) {
    std::string bit = std::string("PROS=") + Bit(*prosody);
    if (ant == nullptr) {
      out.push_back("ROOT|" + bit);
    } else {
      out.push_back(bit);
      out.push_back(bit + "|EXACT=" + exact);
    }
  }
  return out;
}

template <typename Lookup>
DocumentArcs ExtractArcsWith(const Document &doc, const ProsodyView &view,
                             const FeatureConfig &cfg, Lookup &&lookup) {
  DocumentArcs out;
  out.mentions = OrderMentions(doc);
  const auto &ms = out.mentions;
  if (cfg.prosody != ProsodyFeature::kNone &&
      (view.accent.size() != doc.tokens.size() ||
       view.nuclear.size() != doc.tokens.size())) {
    throw InvalidArgument("prosody view of '" + doc.doc_id +
                          "' does not match its tokens");
  }
  std::vector<MentionInfo> info;
  info.reserve(ms.size());
  for (const Mention &m : ms) info.push_back(Describe(doc, doc.nps[m.np_index]));
  out.arcs.resize(ms.size());
  auto to_ids = [&lookup](const std::vector<std::string> &names) {
    FeatureVector ids;
    ids.reserve(names.size());
    for (const std::string &n : names) {
      int id = lookup(n);
      if (id >= 0) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  };
  for (size_t i = 0; i < ms.size(); ++i) {
    auto prosody = ProsodyBit(*info[i].np, view, cfg);
    out.arcs[i].reserve(i + 1);
    out.arcs[i].push_back(to_ids(ArcFeatures(info[i], nullptr, 0, prosody)));
    for (size_t j = 0; j < i; ++j) {
      out.arcs[i].push_back(to_ids(
          ArcFeatures(info[i], &info[j], static_cast<int>(i - j), prosody)));
    }
  }
  return out;
}

// Best antecedent for mention i among the allowed candidates (candidate 0 is
// ROOT, k > 0 is rank k - 1). Earlier candidates win ties.
int BestCandidate(const std::vector<double> &weights,
                  const std::vector<FeatureVector> &candidates,
                  const std::vector<int> &allowed) {
  int best = allowed.front();
  double best_score = Score(weights, candidates[best]);
  for (size_t k = 1; k < allowed.size(); ++k) {
    double s = Score(weights, candidates[allowed[k]]);
    if (s > best_score) {
      best_score = s;
      best = allowed[k];
    }
  }
  return best;
}

}  // namespace

const char *ProsodyFeatureName(ProsodyFeature f) {
  switch (f) {
    case ProsodyFeature::kNone:
      return "none";
    case ProsodyFeature::kAccentPresence:
      return "accent";
    case ProsodyFeature::kNuclearPresence:
      return "nuclear";
  }
  return "none";
}

ProsodyFeature ParseProsodyFeature(const std::string &name) {
  if (name == "none") return ProsodyFeature::kNone;
  if (name == "accent") return ProsodyFeature::kAccentPresence;
  if (name == "nuclear") return ProsodyFeature::kNuclearPresence;
  throw InvalidArgument("unknown prosody feature '" + name + "'");
}

const char *FeatureScopeName(FeatureScope s) {
  return s == FeatureScope::kShortNp ? "short" : "all";
}

FeatureScope ParseFeatureScope(const std::string &name) {
  if (name == "short") return FeatureScope::kShortNp;
  if (name == "all") return FeatureScope::kAllNp;
  throw InvalidArgument("unknown scope '" + name + "'");
}

std::vector<Mention> OrderMentions(const Document &doc) {
  std::vector<int> order(doc.nps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&doc](int a, int b) {
    const NounPhrase &x = doc.nps[a], &y = doc.nps[b];
    if (x.start != y.start) return x.start < y.start;
    return x.end > y.end;
  });
  std::vector<Mention> mentions(order.size());
  for (size_t r = 0; r < order.size(); ++r) {
    mentions[r] = {order[r], static_cast<int>(r)};
  }
  return mentions;
}

std::vector<std::string> PairFeatures(const Document &doc,
                                      const ProsodyView &view,
                                      const std::vector<Mention> &mentions,
                                      int anaphor, int antecedent,
                                      const FeatureConfig &cfg) {
  if (anaphor < 0 || anaphor >= static_cast<int>(mentions.size()) ||
      antecedent >= anaphor || (antecedent < 0 && antecedent != kRoot)) {
    throw InvalidArgument("antecedent must precede the anaphor or be ROOT");
  }
  const NounPhrase &np = doc.nps[mentions[anaphor].np_index];
  MentionInfo ana = Describe(doc, np);
  auto prosody = ProsodyBit(np, view, cfg);
  if (antecedent == kRoot) return ArcFeatures(ana, nullptr, 0, prosody);
  MentionInfo ant = Describe(doc, doc.nps[mentions[antecedent].np_index]);
  return ArcFeatures(ana, &ant, anaphor - antecedent, prosody);
}

int FeatureRegistry::Find(const std::string &name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

int FeatureRegistry::Intern(const std::string &name) {
  auto [it, inserted] = ids_.emplace(name, static_cast<int>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

double Score(const std::vector<double> &weights,
             const FeatureVector &features) {
  double s = 0;
  for (int id : features) {
    if (id >= 0 && static_cast<size_t>(id) < weights.size()) s += weights[id];
  }
  return s;
}

double Score(const CorefModel &model, const FeatureVector &features) {
  return Score(model.averaged_weights, features);
}

DocumentArcs ExtractArcs(const Document &doc, const ProsodyView &view,
                         const FeatureConfig &cfg, FeatureRegistry *registry) {
  return ExtractArcsWith(doc, view, cfg, [registry](const std::string &n) {
    return registry->Intern(n);
  });
}

DocumentArcs ExtractArcs(const Document &doc, const ProsodyView &view,
                         const FeatureConfig &cfg,
                         const FeatureRegistry &registry) {
  return ExtractArcsWith(doc, view, cfg, [&registry](const std::string &n) {
    return registry.Find(n);
  });
}

AntecedentTree DecodeArcs(const std::vector<double> &weights,
                          const DocumentArcs &arcs) {
  AntecedentTree tree;
  tree.parent.resize(arcs.mentions.size());
  std::vector<int> allowed;
  for (size_t i = 0; i < arcs.mentions.size(); ++i) {
    allowed.resize(i + 1);
    std::iota(allowed.begin(), allowed.end(), 0);
    int best = BestCandidate(weights, arcs.arcs[i], allowed);
    tree.parent[i] = best == 0 ? kRoot : best - 1;
  }
  return tree;
}

AntecedentTree Decode(const CorefModel &model, const Document &doc,
                      const ProsodyView &view) {
  return DecodeArcs(model.averaged_weights,
                    ExtractArcs(doc, view, model.config, model.registry));
}

CorefModel TrainCoref(const std::vector<Document> &docs,
                      const std::vector<ProsodyView> &views,
                      const FeatureConfig &cfg, int epochs, uint64_t seed,
                      CorefTrainStats *stats) {
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (cfg.prosody != ProsodyFeature::kNone && views.size() != docs.size()) {
    throw InvalidArgument("one prosody view per document is required");
  }
  bool any_chain = false;
  for (const Document &d : docs) {
    for (const NounPhrase &np : d.nps) any_chain = any_chain || np.chain_id;
  }
  if (!any_chain) throw InvalidArgument("no gold coreference chains");

  CorefModel model;
  model.config = cfg;
  const ProsodyView empty_view;
  std::vector<DocumentArcs> arcs;
  // Allowed gold-consistent candidates per mention, as candidate indices.
  std::vector<std::vector<std::vector<int>>> gold_candidates;
  for (size_t d = 0; d < docs.size(); ++d) {
    const ProsodyView &view = views.empty() ? empty_view : views[d];
    arcs.push_back(ExtractArcs(docs[d], view, cfg, &model.registry));
    const auto &ms = arcs.back().mentions;
    std::vector<std::vector<int>> allowed(ms.size());
    for (size_t i = 0; i < ms.size(); ++i) {
      const auto &chain = docs[d].nps[ms[i].np_index].chain_id;
      for (size_t j = 0; j < i && chain; ++j) {
        if (docs[d].nps[ms[j].np_index].chain_id == chain) {
          allowed[i].push_back(static_cast<int>(j) + 1);
        }
      }
      if (allowed[i].empty()) allowed[i].push_back(0);
    }
    gold_candidates.push_back(std::move(allowed));
  }

  const size_t dim = model.registry.size();
  std::vector<double> w(dim, 0.0), accumulated(dim, 0.0);
  double step = 1;
  std::vector<size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  if (stats) *stats = {};
  std::vector<int> all;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    int errors = 0, updates = 0;
    for (size_t d : order) {
      const DocumentArcs &doc_arcs = arcs[d];
      std::vector<std::pair<int, double>> delta;
      for (size_t i = 0; i < doc_arcs.mentions.size(); ++i) {
        all.resize(i + 1);
        std::iota(all.begin(), all.end(), 0);
        const auto &cands = doc_arcs.arcs[i];
        int predicted = BestCandidate(w, cands, all);
        int latent = BestCandidate(w, cands, gold_candidates[d][i]);
        if (predicted == latent) continue;
        ++errors;
        for (int f : cands[latent]) delta.emplace_back(f, 1.0);
        for (int f : cands[predicted]) delta.emplace_back(f, -1.0);
      }
      if (!delta.empty()) {
        ++updates;
        for (const auto &[f, v] : delta) {
          w[f] += v;
          accumulated[f] += step * v;
        }
      }
      step += 1;
    }
    if (stats) {
      stats->arc_errors.push_back(errors);
      stats->updates.push_back(updates);
    }
  }
  model.weights = w;
  model.averaged_weights.resize(dim);
  for (size_t f = 0; f < dim; ++f) {
    model.averaged_weights[f] = w[f] - accumulated[f] / step;
  }
  return model;
}

std::vector<std::vector<int>> ChainsFromTree(const AntecedentTree &tree) {
  const int n = static_cast<int>(tree.parent.size());
  std::vector<int> root(n);
  for (int i = 0; i < n; ++i) {
    int p = tree.parent[i];
    if (p != kRoot && (p < 0 || p >= i)) {
      throw InvalidArgument("antecedent tree arc " + std::to_string(i) +
                            " -> " + std::to_string(p) + " is not backward");
    }
    root[i] = p == kRoot ? i : root[p];
  }
  std::vector<std::vector<int>> chains;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    if (slot[root[i]] < 0) {
      slot[root[i]] = static_cast<int>(chains.size());
      chains.emplace_back();
    }
    chains[slot[root[i]]].push_back(i);
  }
  return chains;
}

Partition ResponsePartition(const Document &doc,
                            const std::vector<Mention> &mentions,
                            const AntecedentTree &tree) {
  Partition p;
  for (const auto &chain : ChainsFromTree(tree)) {
    std::vector<MentionKey> keys;
    for (int rank : chain) {
      const NounPhrase &np = doc.nps[mentions[rank].np_index];
      keys.push_back({doc.doc_id, np.start, np.end});
    }
    p.chains.push_back(std::move(keys));
  }
  return p;
}

Document WithPredictedChains(const Document &doc,
                             const std::vector<Mention> &mentions,
                             const AntecedentTree &tree) {
  Document out = doc;
  auto chains = ChainsFromTree(tree);
  for (size_t c = 0; c < chains.size(); ++c) {
    for (int rank : chains[c]) {
      out.nps[mentions[rank].np_index].chain_id = static_cast<int>(c);
    }
  }
  return out;
}

std::string EncodeCorefModel(const CorefModel &model) {
  std::string out = "CRM1";
  const FeatureConfig &c = model.config;
  out.push_back(static_cast<char>(c.prosody));
  out.push_back(static_cast<char>(c.scope));
  out.push_back(static_cast<char>(c.label_source));
  AppendLE<uint32_t>(&out, static_cast<uint32_t>(c.short_max_length));
  AppendLE<uint32_t>(&out, static_cast<uint32_t>(model.registry.size()));
  for (const std::string &name : model.registry.names()) {
    AppendString(&out, name);
  }
  for (double w : model.weights) AppendF64(&out, w);
  for (double w : model.averaged_weights) AppendF64(&out, w);
  return out;
}

CorefModel DecodeCorefModel(const std::string &bytes) {
  ByteReader in(bytes, "coref model");
  in.Expect("CRM1");
  CorefModel model;
  uint8_t prosody = in.Read<uint8_t>();
  uint8_t scope = in.Read<uint8_t>();
  uint8_t source = in.Read<uint8_t>();
  if (prosody > 2 || scope > 1 || source > 1) {
    throw ParseError("coref model: bad config block");
  }
  model.config.prosody = static_cast<ProsodyFeature>(prosody);
  model.config.scope = static_cast<FeatureScope>(scope);
  model.config.label_source = static_cast<LabelSource>(source);
  model.config.short_max_length = static_cast<int>(in.Read<uint32_t>());
  uint32_t count = in.Read<uint32_t>();
  for (uint32_t i = 0; i < count; ++i) {
    if (model.registry.Intern(in.ReadString()) != static_cast<int>(i)) {
      throw ParseError("coref model: duplicate feature name");
    }
  }
  model.weights.resize(count);
  model.averaged_weights.resize(count);
  for (double &w : model.weights) w = in.ReadF64();
  for (double &w : model.averaged_weights) w = in.ReadF64();
  for (size_t i = 0; i < count; ++i) {
    if (!std::isfinite(model.weights[i]) ||
        !std::isfinite(model.averaged_weights[i])) {
      throw ParseError("coref model: non-finite weight");
    }
  }
  in.ExpectEnd();
  return model;
}

void SaveCorefModel(const CorefModel &model, const std::string &path) {
  WriteFile(path, EncodeCorefModel(model));
}

CorefModel LoadCorefModel(const std::string &path) {
  return DecodeCorefModel(ReadFile(path));
}

}  // namespace prosocoref
