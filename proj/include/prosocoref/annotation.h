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

// NP-level prosodic features derived from word-level accent and boundary
// labels.

#ifndef PROSOCOREF_ANNOTATION_H_
#define PROSOCOREF_ANNOTATION_H_

#include <string>
#include <vector>

#include "prosocoref/corpus.h"

namespace prosocoref {

enum class LabelSource { kGold, kPredicted };

const char *LabelSourceName(LabelSource source);
// Accepts "gold", "pred" and "predicted".
LabelSource ParseLabelSource(const std::string &name);

inline constexpr int kDefaultShortNpMaxLength = 3;

struct ProsodyView {
  LabelSource source = LabelSource::kGold;
  std::vector<bool> accent;
  std::vector<bool> boundary;
  std::vector<bool> nuclear;
};

struct NPFeatures {
  bool accent_presence = false;
  bool nuclear_presence = false;
  bool is_short = false;

  bool operator==(const NPFeatures &other) const = default;
};

// Intonation phrases end at boundary-marked tokens (inclusive) or at the end
// of the sequence; the last accented token of each phrase is nuclear.
std::vector<bool> DeriveNuclear(const std::vector<bool> &accent,
                                const std::vector<bool> &boundary);

NPFeatures ComputeNpFeatures(const NounPhrase &np, const ProsodyView &view,
                             int short_max_length = kDefaultShortNpMaxLength);

// Throws InvalidArgument naming the first token without a prediction when
// source is kPredicted.
ProsodyView SelectView(const Document &doc, LabelSource source);

// Corpus TSV with a trailing nuclear column (0/1) for inspection.
std::string NuclearReport(const std::vector<Document> &docs,
                          LabelSource source);

}  // namespace prosocoref

#endif  // PROSOCOREF_ANNOTATION_H_
