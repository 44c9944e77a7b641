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

// Frame-level prosodic descriptors: smoothed f0, RMS energy, loudness,
// voicing probability and harmonics-to-noise ratio, computed on 20 ms frames
// with a 10 ms shift.

#ifndef PROSOCOREF_ACOUSTIC_H_
#define PROSOCOREF_ACOUSTIC_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "prosocoref/wav.h"

namespace prosocoref {

inline constexpr double kFrameLength = 0.020;
inline constexpr double kFrameHop = 0.010;
inline constexpr int kNumAcousticFeatures = 5;

inline constexpr double kMinPitchHz = 50.0;
inline constexpr double kMaxPitchHz = 500.0;
inline constexpr double kVoicingThreshold = 0.45;
inline constexpr double kMinHnrDb = -10.0;
inline constexpr double kMaxHnrDb = 40.0;

struct FrameFeatures {
  double f0 = 0;        // Hz, 0 when unvoiced
  double rms = 0;
  double loudness = 0;  // rms^0.3
  double voicing = 0;   // [0, 1]
  double hnr = kMinHnrDb;

  std::array<double, kNumAcousticFeatures> AsArray() const {
    return {f0, rms, loudness, voicing, hnr};
  }
};

struct PitchEstimate {
  double f0 = 0;
  double voicing = 0;
  double hnr = kMinHnrDb;
};

struct EnergyEstimate {
  double rms = 0;
  double loudness = 0;
};

using FeatureRow = std::array<double, kNumAcousticFeatures>;

struct FrameSequence {
  std::vector<FrameFeatures> raw;
  // Per-utterance z-scored copy of raw, one row per frame.
  std::vector<FeatureRow> normalized;
  double frame_len = kFrameLength;
  double hop = kFrameHop;

  int size() const { return static_cast<int>(normalized.size()); }
};

struct FrameGeometry {
  int frame_samples;
  int hop_samples;
};

FrameGeometry FrameGeometryFor(int sample_rate);

// Number of frames for a signal: max(1, floor((n - frame) / hop) + 1).
int NumFrames(size_t n_samples, int sample_rate);

// Overlapping analysis windows; a signal shorter than one frame yields a
// single zero-padded window. Throws InvalidArgument on an empty signal or a
// rate below 8 kHz.
std::vector<std::vector<double>> FrameSignal(const AudioSignal &signal);

// Normalized autocorrelation pitch tracker over lags for 50-500 Hz.
PitchEstimate AutocorrelationPitch(std::span<const double> window, int rate);

EnergyEstimate FrameEnergy(std::span<const double> window);

// Width-5 median filter applied within each voiced run; unvoiced (zero)
// frames are left in place and never mixed into a voiced median.
std::vector<double> SmoothF0(std::span<const double> track);

FrameSequence ExtractFeatures(const AudioSignal &signal);

// "PCF1" feature cache: per-document normalized frame matrices.
struct CachedFeatures {
  std::string doc_id;
  std::vector<FeatureRow> rows;

  bool operator==(const CachedFeatures &other) const = default;
};

std::string EncodeFeatureCache(const std::vector<CachedFeatures> &entries);
std::vector<CachedFeatures> DecodeFeatureCache(const std::string &bytes);

}  // namespace prosocoref

#endif  // PROSOCOREF_ACOUSTIC_H_
