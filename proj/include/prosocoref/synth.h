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

// Synthetic spoken-news corpus with coreference chains and prosodic labels.
//
// Discourse-given NPs tend to be deaccented and new NPs accented; long NPs
// always carry at least one accent, and material after the last new NP of an
// intonation phrase is deaccented, so nuclear accents mark new information.
// Audio is a schematic harmonic tone per word: accented words get an f0
// hump and more energy, phrase-final words are lengthened, fall in pitch and
// fade out, and an 80 ms pause follows every phrase boundary.

#ifndef PROSOCOREF_SYNTH_H_
#define PROSOCOREF_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "prosocoref/corpus.h"
#include "prosocoref/wav.h"

namespace prosocoref {

struct GenConfig {
  int n_docs = 200;
  int min_tokens = 24;  // tokens_per_doc range
  int max_tokens = 40;
  double chain_rate = 0.3;       // P(an NP slot re-mentions an entity)
  double deaccent_given = 0.85;  // P(given short NP is deaccented)
  double accent_new = 0.9;       // P(new NP is accented)
  double accent_flip_noise = 0.181;
  double boundary_flip_noise = 0.145;
  double long_np_rate = 0.25;  // share of new entities realized as long NPs
  double pronoun_rate = 0.15;
  int noun_vocabulary = 3;  // smaller values give more string collisions
  uint64_t seed = 1;
  int sample_rate = 16000;
  bool synthesize_audio = true;
  // Document split written by gen-corpus; the test share is the remainder.
  double train_fraction = 0.7;
  double dev_fraction = 0.1;
};

// Parses flat "key = value" text; '#' starts a comment. Unknown keys and
// out-of-range probabilities raise ParseError.
GenConfig ParseGenConfig(const std::string &text);
std::string FormatGenConfig(const GenConfig &cfg);

struct GeneratedCorpus {
  std::vector<Document> docs;
  std::vector<AudioSignal> audio;  // parallel to docs; empty without audio
};

// Documents carry gold labels and chains; prediction columns hold gold
// labels corrupted with the configured flip noise.
GeneratedCorpus Generate(const GenConfig &cfg);

// Prediction columns = gold labels with independent seeded flips.
void CorruptLabels(std::vector<Document> *docs, double accent_flip,
                   double boundary_flip, uint64_t seed);
inline void CorruptLabels(std::vector<Document> *docs, double flip_prob,
                          uint64_t seed) {
  CorruptLabels(docs, flip_prob, flip_prob, seed);
}

struct CorpusSplit {
  std::vector<Document> train, dev, test;
};

CorpusSplit SplitCorpus(const std::vector<Document> &docs,
                        double train_fraction, double dev_fraction);

// Writes corpus.tsv, train.tsv, dev.tsv, test.tsv and, with audio,
// manifest.tsv plus audio/<doc_id>.wav under out_dir.
void WriteGeneratedCorpus(const GenConfig &cfg, const GeneratedCorpus &corpus,
                          const std::string &out_dir);

}  // namespace prosocoref

#endif  // PROSOCOREF_SYNTH_H_
