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

// Little-endian encoding helpers shared by the binary file formats.

#ifndef PROSOCOREF_SRC_BINARY_IO_H_
#define PROSOCOREF_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <type_traits>

#include "prosocoref/errors.h"

namespace prosocoref {

template <typename T>
T LoadLE(const char *p) {
  static_assert(std::is_unsigned_v<T>);
  T v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return v;
}

template <typename T>
void AppendLE(std::string *out, T v) {
  static_assert(std::is_unsigned_v<T>);
  for (size_t i = 0; i < sizeof(T); ++i) {
    out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

inline void AppendF32(std::string *out, float f) {
  AppendLE<uint32_t>(out, std::bit_cast<uint32_t>(f));
}

inline void AppendF64(std::string *out, double d) {
  AppendLE<uint64_t>(out, std::bit_cast<uint64_t>(d));
}

inline void AppendString(std::string *out, const std::string &s) {
  AppendLE<uint32_t>(out, static_cast<uint32_t>(s.size()));
  *out += s;
}

// Sequential reader over a byte buffer; throws ParseError on overrun.
class ByteReader {
 public:
  ByteReader(const std::string &bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  void Expect(const char *magic) {
    size_t n = std::strlen(magic);
    Need(n);
    if (bytes_.compare(pos_, n, magic) != 0) {
      throw ParseError(what_ + ": bad magic, expected '" + magic + "'");
    }
    pos_ += n;
  }

  template <typename T>
  T Read() {
    Need(sizeof(T));
    T v = LoadLE<T>(bytes_.data() + pos_);
    pos_ += sizeof(T);
    return v;
  }

  float ReadF32() { return std::bit_cast<float>(Read<uint32_t>()); }
  double ReadF64() { return std::bit_cast<double>(Read<uint64_t>()); }

  std::string ReadString() {
    uint32_t n = Read<uint32_t>();
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

  void ExpectEnd() const {
    if (!AtEnd()) throw ParseError(what_ + ": trailing bytes");
  }

 private:
  void Need(size_t n) const {
    if (bytes_.size() - pos_ < n) throw ParseError(what_ + ": truncated");
  }

  const std::string &bytes_;
  std::string what_;
  size_t pos_ = 0;
};

}  // namespace prosocoref

#endif  // PROSOCOREF_SRC_BINARY_IO_H_
