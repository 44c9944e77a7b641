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

// Word-level prosodic event detector.
//
// Each word is classified from a fixed-width frame matrix covering the word
// and its left and right neighbours. The matrix has the five normalized
// acoustic features plus a position-indicator row marking the current
// word's frames. The network is
//
//   conv1: K1 filters spanning all feature rows, width kw1, ReLU
//   conv2: K2 filters over the K1 maps, width kw2, ReLU
//   global max pool over time -> K2 vector
//   affine -> 2 logits -> softmax (no event, event)
//
// One model is trained per event kind (pitch accent or phrase boundary).

#ifndef PROSOCOREF_DETECTOR_H_
#define PROSOCOREF_DETECTOR_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prosocoref/acoustic.h"
#include "prosocoref/corpus.h"

namespace prosocoref {

enum class EventKind : uint8_t { kAccent = 0, kBoundary = 1 };

const char *EventKindName(EventKind kind);
EventKind ParseEventKind(const std::string &name);

inline constexpr int kInputRows = kNumAcousticFeatures + 1;
inline constexpr int kPositionRow = kNumAcousticFeatures;
inline constexpr int kWindowWidth = 120;

struct CnnShape {
  int rows = kInputRows;
  int width = kWindowWidth;
  int conv1_filters = 32;
  int conv1_width = 6;
  int conv2_filters = 32;
  int conv2_width = 4;

  int conv1_length() const { return width - conv1_width + 1; }
  int conv2_length() const { return conv1_length() - conv2_width + 1; }
  bool operator==(const CnnShape &other) const = default;
};

// Row-major [rows x width] input matrix.
struct WordWindowMatrix {
  int rows = kInputRows;
  int width = kWindowWidth;
  std::vector<double> values;
  FrameRange current_span;

  double at(int row, int col) const { return values[row * width + col]; }
  double &at(int row, int col) { return values[row * width + col]; }
};

// Parameter tensors, flattened row-major:
//   conv1_w [K1][rows][kw1], conv2_w [K2][K1][kw2], fc_w [2][K2].
struct CnnParams {
  std::vector<double> conv1_w, conv1_b;
  std::vector<double> conv2_w, conv2_b;
  std::vector<double> fc_w, fc_b;

  static constexpr std::array<const char *, 6> kNames = {
      "conv1_w", "conv1_b", "conv2_w", "conv2_b", "fc_w", "fc_b"};

  static CnnParams Zeros(const CnnShape &shape);

  // Tensors in kNames order.
  std::array<std::vector<double> *, 6> Tensors() {
    return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_w, &fc_b};
  }
  std::array<const std::vector<double> *, 6> Tensors() const {
    return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_w, &fc_b};
  }
  bool operator==(const CnnParams &other) const = default;
};

struct ProsodyModel {
  CnnShape shape;
  EventKind event = EventKind::kAccent;
  uint32_t version = 1;
  CnnParams params;

  static ProsodyModel Zeros(const CnnShape &shape, EventKind event);
  bool operator==(const ProsodyModel &other) const = default;
};

struct TrainConfig {
  int epochs = 20;
  double learning_rate = 0.01;
  int batch_size = 32;
  uint64_t seed = 1;
  double l2 = 1e-5;
};

struct LabeledWindow {
  WordWindowMatrix window;
  bool label = false;
};

// Pads or truncates to kWindowWidth; see BuildWindow.
WordWindowMatrix BuildWindow(const Document &doc, const FrameSequence &frames,
                             int tok_idx);
// Same, against precomputed per-token frame ranges.
WordWindowMatrix BuildWindow(const FrameSequence &frames,
                             std::span<const FrameRange> ranges,
                             int mean_word_frames, int tok_idx);

std::vector<FrameRange> TokenFrameRanges(const Document &doc,
                                         const FrameSequence &frames);
int MeanWordFrames(std::span<const FrameRange> ranges);

// (p_no_event, p_event).
std::array<double, 2> CnnForward(const ProsodyModel &model,
                                 const WordWindowMatrix &m);

struct CnnGradient {
  double loss = 0;  // -log p_gold
  std::array<double, 2> probs{};
  CnnParams params;
  std::vector<double> input;  // d loss / d input, same layout as values
};

CnnGradient CnnBackward(const ProsodyModel &model, const WordWindowMatrix &m,
                        bool gold);

// Mini-batch SGD with L2 and minority-class oversampling. The returned
// weights are rounded to float precision so that saving is lossless.
// epoch_loss, if given, receives the mean training loss of each epoch.
ProsodyModel TrainDetector(std::span<const LabeledWindow> data,
                           const TrainConfig &cfg, EventKind event,
                           const CnnShape &shape = {},
                           std::vector<double> *epoch_loss = nullptr);

// Classifies every token (p_event >= 0.5) and stores the result in the
// token's prediction column for the model's event kind.
std::vector<bool> PredictDocument(const ProsodyModel &model, Document *doc,
                                  const FrameSequence &frames);

struct DetectorScore {
  double accuracy = 0;
  double positive_accuracy = 0;  // recall of the event class
  double negative_accuracy = 0;  // recall of the no-event class
  size_t count = 0;
};

// A class with no gold instances has accuracy 1.
DetectorScore EvaluateDetector(const std::vector<bool> &pred,
                               const std::vector<bool> &gold);

std::string EncodeProsodyModel(const ProsodyModel &model);
ProsodyModel DecodeProsodyModel(const std::string &bytes);
void SaveProsodyModel(const ProsodyModel &model, const std::string &path);
ProsodyModel LoadProsodyModel(const std::string &path);

}  // namespace prosocoref

#endif  // PROSOCOREF_DETECTOR_H_
