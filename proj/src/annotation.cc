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

#include "prosocoref/annotation.h"

#include <sstream>

#include "prosocoref/errors.h"

namespace prosocoref {

const char *LabelSourceName(LabelSource source) {
  return source == LabelSource::kGold ? "gold" : "pred";
}

LabelSource ParseLabelSource(const std::string &name) {
  if (name == "gold") return LabelSource::kGold;
  if (name == "pred" || name == "predicted" || name == "auto") {
    return LabelSource::kPredicted;
  }
  throw InvalidArgument("unknown label source '" + name + "'");
}

std::vector<bool> DeriveNuclear(const std::vector<bool> &accent,
                                const std::vector<bool> &boundary) {
  if (accent.size() != boundary.size()) {
    throw InvalidArgument("accent and boundary lengths differ");
  }
  std::vector<bool> nuclear(accent.size(), false);
  // Walk backwards: the first accent seen after (to the right of) a phrase
  // end is that phrase's last accent.
  bool phrase_has_nuclear = false;
  for (size_t i = accent.size(); i-- > 0;) {
    if (boundary[i]) phrase_has_nuclear = false;
    if (accent[i] && !phrase_has_nuclear) {
      nuclear[i] = true;
      phrase_has_nuclear = true;
    }
  }
  return nuclear;
}

NPFeatures ComputeNpFeatures(const NounPhrase &np, const ProsodyView &view,
                             int short_max_length) {
  NPFeatures f;
  for (int i = np.start; i <= np.end; ++i) {
    f.accent_presence = f.accent_presence || view.accent[i];
    f.nuclear_presence = f.nuclear_presence || view.nuclear[i];
  }
  f.is_short = np.length() <= short_max_length;
  return f;
}

ProsodyView SelectView(const Document &doc, LabelSource source) {
  ProsodyView view;
  view.source = source;
  const size_t n = doc.tokens.size();
  view.accent.resize(n);
  view.boundary.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const Token &t = doc.tokens[i];
    if (source == LabelSource::kGold) {
      view.accent[i] = t.gold_accent;
      view.boundary[i] = t.gold_boundary;
      continue;
    }
    if (!t.pred_accent || !t.pred_boundary) {
      throw InvalidArgument("document '" + doc.doc_id + "' token " +
                            std::to_string(i) + " ('" + t.form +
                            "') has no predicted prosodic labels");
    }
    view.accent[i] = *t.pred_accent;
    view.boundary[i] = *t.pred_boundary;
  }
  view.nuclear = DeriveNuclear(view.accent, view.boundary);
  return view;
}

std::string NuclearReport(const std::vector<Document> &docs,
                          LabelSource source) {
  std::istringstream in(SerializeCorpusText(docs));
  std::string out, line;
  size_t doc_index = 0, tok_index = 0;
  std::vector<bool> nuclear;
  while (std::getline(in, line)) {
    if (line.rfind("#begin document", 0) == 0) {
      nuclear = SelectView(docs[doc_index], source).nuclear;
      tok_index = 0;
    } else if (line.rfind("#end document", 0) == 0) {
      ++doc_index;
    } else if (!line.empty()) {
      line += nuclear[tok_index++] ? "\t1" : "\t0";
    }
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace prosocoref
