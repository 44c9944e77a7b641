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

// Antecedent-tree coreference resolver.
//
// Every mention picks one antecedent among the earlier mentions or a virtual
// ROOT (discourse-new). Arcs are scored by a linear model over sparse binary
// feature templates; the model is trained with a latent-tree structured
// perceptron and decoded greedily, which is exact because the tree score
// factorizes over arcs.

#ifndef PROSOCOREF_COREF_H_
#define PROSOCOREF_COREF_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prosocoref/annotation.h"
#include "prosocoref/corpus.h"
#include "prosocoref/metrics.h"

namespace prosocoref {

enum class ProsodyFeature { kNone, kAccentPresence, kNuclearPresence };
enum class FeatureScope { kShortNp, kAllNp };

const char *ProsodyFeatureName(ProsodyFeature f);
// "none", "accent", "nuclear".
ProsodyFeature ParseProsodyFeature(const std::string &name);
const char *FeatureScopeName(FeatureScope s);
// "short", "all".
FeatureScope ParseFeatureScope(const std::string &name);

struct FeatureConfig {
  ProsodyFeature prosody = ProsodyFeature::kNone;
  FeatureScope scope = FeatureScope::kShortNp;
  LabelSource label_source = LabelSource::kGold;
  int short_max_length = kDefaultShortNpMaxLength;

  bool operator==(const FeatureConfig &other) const = default;
};

struct Mention {
  int np_index = 0;
  int rank = 0;
};

// Mentions in document order: by start token, longer span first.
std::vector<Mention> OrderMentions(const Document &doc);

inline constexpr int kRoot = -1;

struct AntecedentTree {
  std::vector<int> parent;  // antecedent rank, or kRoot

  bool operator==(const AntecedentTree &other) const = default;
};

// Feature strings for the arc anaphor -> antecedent (a rank, or kRoot).
std::vector<std::string> PairFeatures(const Document &doc,
                                      const ProsodyView &view,
                                      const std::vector<Mention> &mentions,
                                      int anaphor, int antecedent,
                                      const FeatureConfig &cfg);

// Sorted unique feature ids.
using FeatureVector = std::vector<int>;

class FeatureRegistry {
 public:
  // Id of name, or -1 when unknown.
  int Find(const std::string &name) const;
  int Intern(const std::string &name);
  size_t size() const { return names_.size(); }
  const std::vector<std::string> &names() const { return names_; }
  bool operator==(const FeatureRegistry &other) const {
    return names_ == other.names_;
  }

 private:
  std::map<std::string, int> ids_;
  std::vector<std::string> names_;
};

struct CorefModel {
  std::vector<double> weights;
  std::vector<double> averaged_weights;
  FeatureRegistry registry;
  FeatureConfig config;

  bool operator==(const CorefModel &other) const = default;
};

double Score(const std::vector<double> &weights, const FeatureVector &features);
// Uses the averaged weights.
double Score(const CorefModel &model, const FeatureVector &features);

// Feature vectors for every candidate arc of a document:
// arcs[i][0] is i -> ROOT, arcs[i][j + 1] is i -> j.
struct DocumentArcs {
  std::vector<Mention> mentions;
  std::vector<std::vector<FeatureVector>> arcs;
};

// When registry is non-const, unseen features are added; otherwise they are
// dropped.
DocumentArcs ExtractArcs(const Document &doc, const ProsodyView &view,
                         const FeatureConfig &cfg, FeatureRegistry *registry);
DocumentArcs ExtractArcs(const Document &doc, const ProsodyView &view,
                         const FeatureConfig &cfg,
                         const FeatureRegistry &registry);

// Highest-scoring antecedent per mention; ties prefer ROOT, then the smallest
// rank.
AntecedentTree DecodeArcs(const std::vector<double> &weights,
                          const DocumentArcs &arcs);
AntecedentTree Decode(const CorefModel &model, const Document &doc,
                      const ProsodyView &view);

// Optional training diagnostics.
struct CorefTrainStats {
  std::vector<int> arc_errors;  // mismatched arcs per epoch
  std::vector<int> updates;     // documents with a weight update per epoch
};

// views[d] is the prosodic view of docs[d]; may be empty when cfg.prosody is
// kNone.
CorefModel TrainCoref(const std::vector<Document> &docs,
                      const std::vector<ProsodyView> &views,
                      const FeatureConfig &cfg, int epochs, uint64_t seed,
                      CorefTrainStats *stats = nullptr);

// Connected components after removing ROOT, as sorted rank lists ordered by
// their first mention.
std::vector<std::vector<int>> ChainsFromTree(const AntecedentTree &tree);

Partition ResponsePartition(const Document &doc,
                            const std::vector<Mention> &mentions,
                            const AntecedentTree &tree);

// Copy of doc whose NP chain ids are the predicted chains, numbered by first
// mention.
Document WithPredictedChains(const Document &doc,
                             const std::vector<Mention> &mentions,
                             const AntecedentTree &tree);

std::string EncodeCorefModel(const CorefModel &model);
CorefModel DecodeCorefModel(const std::string &bytes);
void SaveCorefModel(const CorefModel &model, const std::string &path);
CorefModel LoadCorefModel(const std::string &path);

}  // namespace prosocoref

#endif  // PROSOCOREF_COREF_H_
