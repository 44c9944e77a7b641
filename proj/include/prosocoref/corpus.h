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

// Corpus data model and the token-per-line TSV format.
//
// A corpus file holds documents delimited by "#begin document <id>" and
// "#end document". Every token line has twelve tab-separated columns:
//
//   doc_id sent_idx tok_idx form pos start end np_coref
//   gold_accent gold_boundary pred_accent pred_boundary
//
// np_coref uses CoNLL-2012 bracket notation ("(3", "3)", "(3)", joined by
// '|', "-" for none). The id "*" marks an NP that belongs to no gold chain.
// Prediction columns hold 0, 1 or "-" when absent. Sentences are separated by
// a blank line.

#ifndef PROSOCOREF_CORPUS_H_
#define PROSOCOREF_CORPUS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prosocoref {

struct Token {
  std::string doc_id;
  int sent_idx = 0;
  int tok_idx = 0;
  std::string form;
  std::string pos;
  double start_time = 0.0;
  double end_time = 0.0;
  bool gold_accent = false;
  bool gold_boundary = false;
  std::optional<bool> pred_accent;
  std::optional<bool> pred_boundary;

  bool operator==(const Token &other) const = default;
};

// Inclusive token span into Document::tokens.
struct NounPhrase {
  int start = 0;
  int end = 0;
  std::optional<int> chain_id;

  int length() const { return end - start + 1; }
  bool operator==(const NounPhrase &other) const = default;
};

struct Document {
  std::string doc_id;
  std::vector<Token> tokens;
  // Canonical order: by start ascending, then longer span first.
  std::vector<NounPhrase> nps;
  std::optional<std::string> audio_path;

  bool operator==(const Document &other) const = default;
};

// Half-open range of frame indices.
struct FrameRange {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool operator==(const FrameRange &other) const = default;
};

// Sorts NPs into canonical order.
void CanonicalizeNps(std::vector<NounPhrase> *nps);

// Checks every document invariant; throws InvalidArgument naming the problem.
void ValidateDocument(const Document &doc);

// Parses a corpus from text. Throws ParseError carrying the line number.
std::vector<Document> ParseCorpusText(const std::string &text);
std::vector<Document> ParseCorpus(const std::string &path);

std::string SerializeCorpusText(const std::vector<Document> &docs);
void SerializeCorpus(const std::vector<Document> &docs,
                     const std::string &path);

// Audio manifest: one "doc_id<TAB>wav_path" per line. Relative paths are
// resolved against the manifest's directory.
std::map<std::string, std::string> ReadManifest(const std::string &path);
void WriteManifest(const std::map<std::string, std::string> &entries,
                   const std::string &path);
// Sets audio_path on every document listed in the manifest.
void AttachAudio(const std::map<std::string, std::string> &manifest,
                 std::vector<Document> *docs);

// Frames covered by a token: [floor(start/hop), floor(end/hop)) clipped to
// [0, n_frames_total). Never empty: a range that clips away or is shorter
// than one frame collapses to the nearest valid frame.
FrameRange WordFrameRange(const Token &token, double hop, int n_frames_total);

// Gold coreference chains as lists of NP indices. NPs without a chain id
// become singleton chains. Chains are ordered by their first NP.
std::vector<std::vector<int>> GoldChains(const Document &doc);

// Whole-file helpers.
std::string ReadFile(const std::string &path);
void WriteFile(const std::string &path, const std::string &contents);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace prosocoref

#endif  // PROSOCOREF_CORPUS_H_
