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

#include "prosocoref/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "binary_io.h"
#include "prosocoref/corpus.h"

namespace prosocoref {

namespace {

using Kind = WavError::Kind;

constexpr uint16_t kFormatPcm = 1;

}  // namespace

AudioSignal DecodeWav(const std::string &bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    if (bytes.size() < 12 && bytes.compare(0, 4, "RIFF") == 0) {
      throw WavError(Kind::kTruncated, "wav: truncated RIFF header");
    }
    throw WavError(Kind::kNotRiff, "wav: not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  uint16_t channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t pos = 12;
  while (true) {
    if (pos + 8 > bytes.size()) {
      throw WavError(Kind::kTruncated, "wav: no data chunk");
    }
    std::string id = bytes.substr(pos, 4);
    uint32_t size = LoadLE<uint32_t>(bytes.data() + pos + 4);
    pos += 8;
    if (id == "fmt ") {
      if (size < 16 || pos + size > bytes.size()) {
        throw WavError(Kind::kTruncated, "wav: truncated fmt chunk");
      }
      uint16_t format = LoadLE<uint16_t>(bytes.data() + pos);
      channels = LoadLE<uint16_t>(bytes.data() + pos + 2);
      rate = LoadLE<uint32_t>(bytes.data() + pos + 4);
      bits = LoadLE<uint16_t>(bytes.data() + pos + 14);
      if (format != kFormatPcm) {
        throw WavError(Kind::kNotPcm, "wav: format tag " +
                                          std::to_string(format) +
                                          " is not integer PCM");
      }
      if (channels != 1) {
        throw WavError(Kind::kNotMono, "wav: " + std::to_string(channels) +
                                           " channels, expected mono");
      }
      if (bits != 16) {
        throw WavError(Kind::kNot16Bit,
                       "wav: " + std::to_string(bits) + "-bit samples");
      }
      if (rate == 0) throw WavError(Kind::kNotPcm, "wav: zero sample rate");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw WavError(Kind::kNotPcm, "wav: data before fmt");
      if (pos + size > bytes.size() || size % 2 != 0) {
        throw WavError(Kind::kTruncated,
                       "wav: header claims " + std::to_string(size) +
                           " data bytes, " +
                           std::to_string(bytes.size() - pos) + " present");
      }
      if (size == 0) throw WavError(Kind::kEmpty, "wav: no samples");
      AudioSignal signal;
      signal.sample_rate = static_cast<int>(rate);
      signal.samples.resize(size / 2);
      for (size_t i = 0; i < signal.samples.size(); ++i) {
        int16_t v = static_cast<int16_t>(
            LoadLE<uint16_t>(bytes.data() + pos + 2 * i));
        signal.samples[i] = static_cast<float>(v) / 32768.0f;
      }
      return signal;
    }
    pos += size + (size & 1);
  }
}

AudioSignal ReadWav(const std::string &path) { return DecodeWav(ReadFile(path)); }

std::string EncodeWav(const AudioSignal &signal) {
  const uint32_t data_bytes = static_cast<uint32_t>(signal.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  AppendLE<uint32_t>(&out, 36 + data_bytes);
  out += "WAVEfmt ";
  AppendLE<uint32_t>(&out, 16);
  AppendLE<uint16_t>(&out, kFormatPcm);
  AppendLE<uint16_t>(&out, 1);
  AppendLE<uint32_t>(&out, static_cast<uint32_t>(signal.sample_rate));
  AppendLE<uint32_t>(&out, static_cast<uint32_t>(signal.sample_rate) * 2);
  AppendLE<uint16_t>(&out, 2);
  AppendLE<uint16_t>(&out, 16);
  out += "data";
  AppendLE<uint32_t>(&out, data_bytes);
  for (float s : signal.samples) {
    double scaled = std::round(static_cast<double>(s) * 32768.0);
    auto v = static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    AppendLE<uint16_t>(&out, static_cast<uint16_t>(v));
  }
  return out;
}

void WriteWav(const AudioSignal &signal, const std::string &path) {
  WriteFile(path, EncodeWav(signal));
}

}  // namespace prosocoref
