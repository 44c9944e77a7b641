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

#include "prosocoref/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

#include "prosocoref/errors.h"

namespace prosocoref {

namespace {

constexpr double kTimeSlack = 1e-6;
constexpr int kNumColumns = 12;
constexpr const char *kBegin = "#begin document ";
constexpr const char *kEnd = "#end document";

std::vector<std::string> SplitOn(const std::string &s, char sep) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    size_t next = s.find(sep, pos);
    if (next == std::string::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

int ParseInt(const std::string &field, const char *what, size_t line) {
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 0) {
    throw ParseError(std::string("bad ") + what + " '" + field + "'", line);
  }
  return value;
}

double ParseTime(const std::string &field, const char *what, size_t line) {
  double value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() ||
      !std::isfinite(value) || value < 0) {
    throw ParseError(std::string("bad ") + what + " '" + field + "'", line);
  }
  return value;
}

bool ParseFlag(const std::string &field, const char *what, size_t line) {
  if (field == "0") return false;
  if (field == "1") return true;
  throw ParseError(std::string("bad ") + what + " '" + field + "'", line);
}

std::optional<bool> ParseOptionalFlag(const std::string &field,
                                      const char *what, size_t line) {
  if (field == "-") return std::nullopt;
  return ParseFlag(field, what, line);
}

// Open brackets of one document, keyed by chain id text ("*" for none).
struct OpenSpan {
  int start;
  size_t line;
};

class DocumentBuilder {
 public:
  DocumentBuilder(std::string id, size_t line) : begin_line_(line) {
    doc_.doc_id = std::move(id);
  }

  void AddToken(const std::vector<std::string> &fields, size_t line) {
    Token tok;
    tok.doc_id = fields[0];
    if (tok.doc_id != doc_.doc_id) {
      throw ParseError("token doc_id '" + tok.doc_id +
                           "' does not match document '" + doc_.doc_id + "'",
                       line);
    }
    tok.sent_idx = ParseInt(fields[1], "sent_idx", line);
    tok.tok_idx = ParseInt(fields[2], "tok_idx", line);
    tok.form = fields[3];
    tok.pos = fields[4];
    if (tok.form.empty() || tok.pos.empty()) {
      throw ParseError("empty form or pos", line);
    }
    tok.start_time = ParseTime(fields[5], "start_time", line);
    tok.end_time = ParseTime(fields[6], "end_time", line);
    if (!(tok.end_time > tok.start_time)) {
      throw ParseError("timing error: end_time " + fields[6] +
                           " is not after start_time " + fields[5],
                       line);
    }
    tok.gold_accent = ParseFlag(fields[8], "gold_accent", line);
    tok.gold_boundary = ParseFlag(fields[9], "gold_boundary", line);
    tok.pred_accent = ParseOptionalFlag(fields[10], "pred_accent", line);
    tok.pred_boundary = ParseOptionalFlag(fields[11], "pred_boundary", line);

    if (!doc_.tokens.empty()) {
      const Token &prev = doc_.tokens.back();
      if (std::tie(prev.sent_idx, prev.tok_idx) >=
          std::tie(tok.sent_idx, tok.tok_idx)) {
        throw ParseError("tokens not strictly ordered by (sent_idx, tok_idx)",
                         line);
      }
      if (prev.end_time > tok.start_time + kTimeSlack) {
        throw ParseError("timing error: token overlaps the previous token",
                         line);
      }
    }
    int index = static_cast<int>(doc_.tokens.size());
    doc_.tokens.push_back(std::move(tok));
    ParseBrackets(fields[7], index, line);
  }

  Document Finish(size_t line) {
    for (const auto &[id, stack] : open_) {
      if (!stack.empty()) {
        throw ParseError("unclosed NP bracket '(" + id + "' opened on line " +
                             std::to_string(stack.back().line),
                         line);
      }
    }
    CanonicalizeNps(&doc_.nps);
    try {
      ValidateDocument(doc_);
    } catch (const InvalidArgument &e) {
      throw ParseError(std::string("document '") + doc_.doc_id +
                           "' (begins line " + std::to_string(begin_line_) +
                           "): " + e.what(),
                       line);
    }
    return std::move(doc_);
  }

 private:
  static std::optional<int> ChainFromText(const std::string &id,
                                          size_t line) {
    if (id == "*") return std::nullopt;
    return ParseInt(id, "chain id", line);
  }

  void ParseBrackets(const std::string &field, int index, size_t line) {
    if (field == "-") return;
    for (const std::string &part : SplitOn(field, '|')) {
      bool opens = !part.empty() && part.front() == '(';
      bool closes = !part.empty() && part.back() == ')';
      std::string id =
          part.substr(opens ? 1 : 0,
                      part.size() - (opens ? 1 : 0) - (closes ? 1 : 0));
      if ((!opens && !closes) || id.empty()) {
        throw ParseError("bad np_coref entry '" + part + "'", line);
      }
      std::optional<int> chain = ChainFromText(id, line);
      if (opens && closes) {
        doc_.nps.push_back({index, index, chain});
      } else if (opens) {
        open_[id].push_back({index, line});
      } else {
        auto &stack = open_[id];
        if (stack.empty()) {
          throw ParseError("closing bracket '" + part + "' without opener",
                           line);
        }
        doc_.nps.push_back({stack.back().start, index, chain});
        stack.pop_back();
      }
    }
  }

  Document doc_;
  size_t begin_line_;
  std::map<std::string, std::vector<OpenSpan>> open_;
};

std::string ChainText(const NounPhrase &np) {
  return np.chain_id ? std::to_string(*np.chain_id) : std::string("*");
}

std::string BracketColumn(const std::vector<NounPhrase> &nps, int t) {
  std::vector<const NounPhrase *> opens, singles, closes;
  for (const NounPhrase &np : nps) {
    if (np.start == t && np.end == t) {
      singles.push_back(&np);
    } else if (np.start == t) {
      opens.push_back(&np);
    } else if (np.end == t) {
      closes.push_back(&np);
    }
  }
  // Outer spans open first and close last.
  std::sort(opens.begin(), opens.end(),
            [](auto *a, auto *b) { return a->end > b->end; });
  std::sort(closes.begin(), closes.end(),
            [](auto *a, auto *b) { return a->start > b->start; });
  std::string out;
  auto append = [&out](const std::string &s) {
    if (!out.empty()) out += '|';
    out += s;
  };
  for (auto *np : opens) append("(" + ChainText(*np));
  for (auto *np : singles) append("(" + ChainText(*np) + ")");
  for (auto *np : closes) append(ChainText(*np) + ")");
  return out.empty() ? "-" : out;
}

const char *FlagText(bool b) { return b ? "1" : "0"; }

const char *OptionalFlagText(const std::optional<bool> &b) {
  return b ? FlagText(*b) : "-";
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void CanonicalizeNps(std::vector<NounPhrase> *nps) {
  std::sort(nps->begin(), nps->end(),
            [](const NounPhrase &a, const NounPhrase &b) {
              if (a.start != b.start) return a.start < b.start;
              if (a.end != b.end) return a.end > b.end;
              return a.chain_id < b.chain_id;
            });
}

void ValidateDocument(const Document &doc) {
  const auto &toks = doc.tokens;
  for (size_t i = 0; i < toks.size(); ++i) {
    const Token &t = toks[i];
    if (t.doc_id != doc.doc_id) {
      throw InvalidArgument("token " + std::to_string(i) +
                            " has a foreign doc_id");
    }
    if (!(t.start_time >= 0) || !(t.end_time > t.start_time)) {
      throw InvalidArgument("token " + std::to_string(i) +
                            " has end_time <= start_time");
    }
    if (i > 0) {
      const Token &p = toks[i - 1];
      if (std::tie(p.sent_idx, p.tok_idx) >= std::tie(t.sent_idx, t.tok_idx)) {
        throw InvalidArgument("token " + std::to_string(i) + " is out of order");
      }
      if (p.end_time > t.start_time + kTimeSlack) {
        throw InvalidArgument("token " + std::to_string(i) +
                              " overlaps the previous token in time");
      }
    }
  }
  const int n = static_cast<int>(toks.size());
  for (size_t i = 0; i < doc.nps.size(); ++i) {
    const NounPhrase &np = doc.nps[i];
    if (np.start < 0 || np.end >= n || np.start > np.end) {
      throw InvalidArgument("NP " + std::to_string(i) + " span [" +
                            std::to_string(np.start) + ", " +
                            std::to_string(np.end) + "] is invalid");
    }
    if (toks[np.start].sent_idx != toks[np.end].sent_idx) {
      throw InvalidArgument("NP " + std::to_string(i) +
                            " crosses a sentence boundary");
    }
    if (np.chain_id && *np.chain_id < 0) {
      throw InvalidArgument("NP " + std::to_string(i) +
                            " has a negative chain id");
    }
  }
  std::vector<NounPhrase> sorted = doc.nps;
  CanonicalizeNps(&sorted);
  std::vector<const NounPhrase *> stack;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const NounPhrase &np = sorted[i];
    if (i > 0 && sorted[i - 1].start == np.start &&
        sorted[i - 1].end == np.end) {
      throw InvalidArgument("duplicate NP span [" + std::to_string(np.start) +
                            ", " + std::to_string(np.end) + "]");
    }
    while (!stack.empty() && stack.back()->end < np.start) stack.pop_back();
    if (!stack.empty() && np.end > stack.back()->end) {
      throw InvalidArgument("NP spans [" + std::to_string(stack.back()->start) +
                            ", " + std::to_string(stack.back()->end) +
                            "] and [" + std::to_string(np.start) + ", " +
                            std::to_string(np.end) +
                            "] overlap without nesting");
    }
    stack.push_back(&np);
  }
}

std::vector<Document> ParseCorpusText(const std::string &text) {
  std::vector<Document> docs;
  std::optional<DocumentBuilder> current;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  const std::string begin = kBegin;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind(begin, 0) == 0) {
      if (current) throw ParseError("nested #begin document", lineno);
      std::string id = line.substr(begin.size());
      if (id.empty()) throw ParseError("document id missing", lineno);
      current.emplace(std::move(id), lineno);
      continue;
    }
    if (line == kEnd) {
      if (!current) throw ParseError("#end document without #begin", lineno);
      docs.push_back(current->Finish(lineno));
      current.reset();
      continue;
    }
    if (!current) throw ParseError("content outside a document", lineno);
    std::vector<std::string> fields = SplitOn(line, '\t');
    if (fields.size() != kNumColumns) {
      throw ParseError("expected " + std::to_string(kNumColumns) +
                           " tab-separated columns, found " +
                           std::to_string(fields.size()),
                       lineno);
    }
    current->AddToken(fields, lineno);
  }
  if (current) throw ParseError("missing #end document", lineno);
  return docs;
}

std::vector<Document> ParseCorpus(const std::string &path) {
  return ParseCorpusText(ReadFile(path));
}

std::string SerializeCorpusText(const std::vector<Document> &docs) {
  std::string out;
  for (const Document &doc : docs) {
    out += kBegin + doc.doc_id + "\n";
    for (size_t i = 0; i < doc.tokens.size(); ++i) {
      const Token &t = doc.tokens[i];
      if (i > 0 && doc.tokens[i - 1].sent_idx != t.sent_idx) out += "\n";
      out += t.doc_id;
      out += '\t' + std::to_string(t.sent_idx);
      out += '\t' + std::to_string(t.tok_idx);
      out += '\t' + t.form;
      out += '\t' + t.pos;
      out += '\t' + FormatDouble(t.start_time);
      out += '\t' + FormatDouble(t.end_time);
      out += '\t' + BracketColumn(doc.nps, static_cast<int>(i));
      out += '\t';
      out += FlagText(t.gold_accent);
      out += '\t';
      out += FlagText(t.gold_boundary);
      out += '\t';
      out += OptionalFlagText(t.pred_accent);
      out += '\t';
      out += OptionalFlagText(t.pred_boundary);
      out += '\n';
    }
    out += kEnd;
    out += '\n';
  }
  return out;
}

void SerializeCorpus(const std::vector<Document> &docs,
                     const std::string &path) {
  for (const Document &doc : docs) ValidateDocument(doc);
  WriteFile(path, SerializeCorpusText(docs));
}

std::map<std::string, std::string> ReadManifest(const std::string &path) {
  namespace fs = std::filesystem;
  std::map<std::string, std::string> entries;
  std::istringstream in(ReadFile(path));
  fs::path base = fs::path(path).parent_path();
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw ParseError("manifest lines are 'doc_id<TAB>path'", lineno);
    }
    fs::path wav = line.substr(tab + 1);
    if (wav.is_relative()) wav = base / wav;
    if (!entries.emplace(line.substr(0, tab), wav.string()).second) {
      throw ParseError("duplicate manifest entry", lineno);
    }
  }
  return entries;
}

void WriteManifest(const std::map<std::string, std::string> &entries,
                   const std::string &path) {
  std::string out;
  for (const auto &[id, wav] : entries) out += id + "\t" + wav + "\n";
  WriteFile(path, out);
}

void AttachAudio(const std::map<std::string, std::string> &manifest,
                 std::vector<Document> *docs) {
  for (Document &doc : *docs) {
    auto it = manifest.find(doc.doc_id);
    if (it != manifest.end()) doc.audio_path = it->second;
  }
}

FrameRange WordFrameRange(const Token &token, double hop, int n_frames_total) {
  if (!(hop > 0) || n_frames_total < 1) {
    throw InvalidArgument("WordFrameRange needs hop > 0 and >= 1 frame");
  }
  // The epsilon keeps exact multiples such as 0.30 / 0.01 on the right side
  // of the floor.
  auto frame_of = [hop](double t) {
    return static_cast<long long>(std::floor(t / hop + 1e-9));
  };
  long long b = frame_of(token.start_time);
  long long e = frame_of(token.end_time);
  long long n = n_frames_total;
  long long cb = std::clamp(b, 0LL, n);
  long long ce = std::clamp(e, 0LL, n);
  if (ce <= cb) {
    int nearest = static_cast<int>(std::clamp(b, 0LL, n - 1));
    return {nearest, nearest + 1};
  }
  return {static_cast<int>(cb), static_cast<int>(ce)};
}

std::vector<std::vector<int>> GoldChains(const Document &doc) {
  std::vector<std::vector<int>> chains;
  std::map<int, size_t> slot;
  for (size_t i = 0; i < doc.nps.size(); ++i) {
    const auto &chain = doc.nps[i].chain_id;
    if (!chain) {
      chains.push_back({static_cast<int>(i)});
      continue;
    }
    auto [it, inserted] = slot.emplace(*chain, chains.size());
    if (inserted) chains.emplace_back();
    chains[it->second].push_back(static_cast<int>(i));
  }
  return chains;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string &path, const std::string &contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace prosocoref
