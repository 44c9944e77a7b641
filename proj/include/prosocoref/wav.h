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

#ifndef PROSOCOREF_WAV_H_
#define PROSOCOREF_WAV_H_

#include <string>
#include <vector>

#include "prosocoref/errors.h"

namespace prosocoref {

// Mono audio with samples in [-1, 1].
struct AudioSignal {
  std::vector<float> samples;
  int sample_rate = 16000;
};

class WavError : public Error {
 public:
  enum class Kind { kNotRiff, kNotPcm, kNotMono, kNot16Bit, kTruncated, kEmpty };

  WavError(Kind kind, const std::string &message)
      : Error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Decodes a RIFF/WAVE PCM 16-bit mono file. Samples are divided by 32768.
AudioSignal DecodeWav(const std::string &bytes);
AudioSignal ReadWav(const std::string &path);

// Encodes as PCM 16-bit mono, rounding and clipping to the int16 range.
std::string EncodeWav(const AudioSignal &signal);
void WriteWav(const AudioSignal &signal, const std::string &path);

}  // namespace prosocoref

#endif  // PROSOCOREF_WAV_H_
