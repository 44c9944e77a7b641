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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "prosocoref/wav.h"

using namespace prosocoref;

namespace {

void Put16(std::string *s, uint16_t v) {
  s->push_back(static_cast<char>(v & 0xff));
  s->push_back(static_cast<char>(v >> 8));
}

void Put32(std::string *s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s->push_back(static_cast<char>(v >> (8 * i)));
}

// Hand-assembled header, independent of EncodeWav.
std::string Wav(const std::vector<int16_t> &samples, uint16_t format = 1,
                uint16_t channels = 1, uint16_t bits = 16, int rate = 16000,
                int32_t claimed_bytes = -1) {
  const uint32_t data_bytes = claimed_bytes >= 0
                                  ? static_cast<uint32_t>(claimed_bytes)
                                  : static_cast<uint32_t>(samples.size() * 2);
  std::string s = "RIFF";
  Put32(&s, 36 + data_bytes);
  s += "WAVEfmt ";
  Put32(&s, 16);
  Put16(&s, format);
  Put16(&s, channels);
  Put32(&s, rate);
  Put32(&s, rate * channels * bits / 8);
  Put16(&s, static_cast<uint16_t>(channels * bits / 8));
  Put16(&s, bits);
  s += "data";
  Put32(&s, data_bytes);
  for (int16_t v : samples) Put16(&s, static_cast<uint16_t>(v));
  return s;
}

WavError::Kind KindOf(const std::string &bytes) {
  try {
    DecodeWav(bytes);
  } catch (const WavError &e) {
    return e.kind();
  }
  FAIL("expected a WavError");
  return WavError::Kind::kEmpty;
}

}  // namespace

TEST_CASE("zeros decode to zeros") {
  AudioSignal s = DecodeWav(Wav(std::vector<int16_t>(16000, 0)));
  CHECK(s.sample_rate == 16000);
  REQUIRE(s.samples.size() == 16000);
  for (float x : s.samples) CHECK(x == 0.0f);
}

TEST_CASE("scaling divides by 32768") {
  AudioSignal s = DecodeWav(Wav({-32768, 32767, 16384, -1}, 1, 1, 16, 8000));
  CHECK(s.sample_rate == 8000);
  CHECK(s.samples[0] == -1.0f);
  CHECK(s.samples[1] == doctest::Approx(32767.0 / 32768.0));
  CHECK(s.samples[2] == 0.5f);
  CHECK(s.samples[3] == doctest::Approx(-1.0 / 32768.0));
}

TEST_CASE("invalid files raise distinct error kinds") {
  CHECK(KindOf("not a wav file at all, just text padding it out") ==
        WavError::Kind::kNotRiff);
  CHECK(KindOf(Wav({1, 2}, 3)) == WavError::Kind::kNotPcm);
  CHECK(KindOf(Wav({1, 2}, 1, 2)) == WavError::Kind::kNotMono);
  CHECK(KindOf(Wav({1, 2}, 1, 1, 8)) == WavError::Kind::kNot16Bit);
  CHECK(KindOf(Wav({1, 2}, 1, 1, 16, 16000, 400)) ==
        WavError::Kind::kTruncated);
  CHECK(KindOf(Wav({})) == WavError::Kind::kEmpty);
  CHECK(KindOf("RIFF") == WavError::Kind::kTruncated);
}

TEST_CASE("encode then decode reproduces 16-bit samples") {
  AudioSignal s;
  s.sample_rate = 22050;
  s.samples = {0.0f, 0.25f, -0.5f, 1.0f, -1.0f, 2.0f};
  AudioSignal back = DecodeWav(EncodeWav(s));
  CHECK(back.sample_rate == 22050);
  REQUIRE(back.samples.size() == s.samples.size());
  CHECK(back.samples[1] == 0.25f);
  CHECK(back.samples[2] == -0.5f);
  CHECK(back.samples[3] == doctest::Approx(32767.0 / 32768.0));  // clipped
  CHECK(back.samples[4] == -1.0f);
  CHECK(back.samples[5] == doctest::Approx(32767.0 / 32768.0));
  CHECK(EncodeWav(s) == Wav({0, 8192, -16384, 32767, -32768, 32767}, 1, 1, 16,
                            22050));
}

TEST_CASE("file helpers") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "prosocoref_wav_test.wav")
          .string();
  AudioSignal s;
  s.samples = {0.5f, -0.5f};
  WriteWav(s, path);
  CHECK(ReadWav(path).samples == s.samples);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ReadWav(path), IoError);
}
