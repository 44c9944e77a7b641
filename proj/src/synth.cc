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

#include "prosocoref/synth.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "prosocoref/errors.h"

namespace prosocoref {

namespace {

const std::vector<std::string> kNouns = {
    "house", "car",   "plan",   "law",    "party",  "court",  "bank",
    "city",  "union", "report", "budget", "school", "market", "bridge",
    "army",  "tax"};
const std::vector<std::string> kNames = {"Berlin", "Merkel", "Siemens",
                                         "Bonn"};
const std::vector<std::string> kAdjectives = {"new", "old", "local", "big"};
const std::vector<std::pair<std::string, std::string>> kAdjectivePairs = {
    {"big", "new"}, {"old", "local"}, {"small", "public"}};
const std::vector<std::string> kVerbs = {"saw",      "built",   "sold",
                                         "reported", "visited", "praised",
                                         "rejected", "discussed"};
const std::vector<std::string> kPrepositions = {"with", "about", "for"};
const std::vector<std::string> kFillers = {"today", "again", "yesterday",
                                           "quickly"};

constexpr int kMaxSentenceTokens = 11;
constexpr int kRecentMentions = 8;
constexpr size_t kShortNp = 3;
constexpr double kLeadSilence = 0.05;
constexpr double kWordGap = 0.01;
constexpr double kBoundaryPause = 0.080;

struct Word {
  std::string form;
  std::string pos;
  bool accent = false;
  bool boundary = false;
  bool in_np = false;
  bool pinned = false;  // exempt from post-focal deaccenting
};

struct Entity {
  std::vector<std::pair<std::string, std::string>> words;  // (form, pos)
  bool is_long = false;
};

struct NpSlot {
  int start = 0;
  int end = 0;
  int chain = 0;
  bool given = false;
  bool is_long = false;
};

// Derives an independent stream per (seed, stream, index).
std::mt19937_64 MakeRng(uint64_t seed, uint64_t stream, uint64_t index) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream), static_cast<uint32_t>(index),
                    static_cast<uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

class DocumentGenerator {
 public:
  DocumentGenerator(const GenConfig &cfg, std::mt19937_64 *rng)
      : cfg_(cfg), rng_(*rng) {}

  void Run(int target_tokens) {
    int sent = 0;
    while (static_cast<int>(words_.size()) < target_tokens) {
      int size = static_cast<int>(words_.size());
      if (size >= cfg_.min_tokens && size + kMaxSentenceTokens > cfg_.max_tokens) {
        break;
      }
      Sentence(sent++);
    }
  }

  std::vector<Word> words_;
  std::vector<int> sentence_of_;
  std::vector<NpSlot> nps_;

 private:
  double Uniform() { return std::uniform_real_distribution<double>(0, 1)(rng_); }
  bool Chance(double p) { return Uniform() < p; }
  template <typename T>
  const T &Pick(const std::vector<T> &v, size_t limit = SIZE_MAX) {
    size_t n = std::min(v.size(), limit);
    return v[std::uniform_int_distribution<size_t>(0, n - 1)(rng_)];
  }

  void Push(const std::string &form, const std::string &pos, int sent,
            bool in_np = false) {
    words_.push_back({form, pos, false, false, in_np, false});
    sentence_of_.push_back(sent);
  }

  // Emits one NP; returns its slot index.
  int MakeNp(int sent) {
    const int start = static_cast<int>(words_.size());
    NpSlot slot;
    slot.start = start;
    std::vector<std::pair<std::string, std::string>> surface;
    if (!entities_.empty() && Chance(cfg_.chain_rate)) {
      std::vector<int> candidates;
      for (auto it = recent_.rbegin(); it != recent_.rend(); ++it) {
        if (std::find(candidates.begin(), candidates.end(), *it) ==
            candidates.end()) {
          candidates.push_back(*it);
        }
      }
      int id = Pick(candidates);
      const Entity &e = entities_[id];
      slot.chain = id;
      slot.given = true;
      const bool nominal = e.words.front().second == "DT";
      if (id == recent_.back() && Chance(cfg_.pronoun_rate)) {
        surface = {{"it", "PRP"}};
      } else if (nominal && e.words.size() != 2 && Chance(0.4)) {
        surface = {{"the", "DT"}, e.words.back()};
      } else if (nominal && !e.is_long && Chance(0.25)) {
        // Elaborated re-mention: long, but still given.
        const auto &adj = Pick(kAdjectivePairs);
        surface = {{"the", "DT"},
                   {adj.first, "JJ"},
                   {adj.second, "JJ"},
                   e.words.back()};
      } else {
        surface = e.words;
      }
    } else {
      Entity e;
      size_t vocab = static_cast<size_t>(std::max(1, cfg_.noun_vocabulary));
      if (Chance(cfg_.long_np_rate)) {
        const auto &adj = Pick(kAdjectivePairs);
        e.words = {{"the", "DT"},
                   {adj.first, "JJ"},
                   {adj.second, "JJ"},
                   {Pick(kNouns, vocab), "NN"}};
        e.is_long = true;
      } else {
        double u = Uniform();
        if (u < 0.15) {
          e.words = {{Pick(kNames), "NE"}};
        } else if (u < 0.75) {
          e.words = {{"the", "DT"}, {Pick(kNouns, vocab), "NN"}};
        } else {
          e.words = {{"the", "DT"},
                     {Pick(kAdjectives), "JJ"},
                     {Pick(kNouns, vocab), "NN"}};
        }
      }
      slot.chain = static_cast<int>(entities_.size());
      surface = e.words;
      entities_.push_back(std::move(e));
    }
    for (const auto &[form, pos] : surface) Push(form, pos, sent, true);
    slot.end = static_cast<int>(words_.size()) - 1;
    slot.is_long = surface.size() > kShortNp;
    recent_.push_back(slot.chain);
    if (recent_.size() > kRecentMentions) recent_.erase(recent_.begin());

    // Short NPs take one accent decision on the head; long NPs always
    // accent their modifiers.
    const bool head_accented = slot.given ? !Chance(cfg_.deaccent_given)
                                          : Chance(cfg_.accent_new);
    words_[slot.end].accent = head_accented;
    if (slot.is_long) {
      for (int i = start; i < slot.end; ++i) {
        if (words_[i].pos == "JJ") words_[i].accent = true;
      }
    }
    nps_.push_back(slot);
    return static_cast<int>(nps_.size()) - 1;
  }

  void Sentence(int sent) {
    const int first = static_cast<int>(words_.size());
    int subject = MakeNp(sent);
    const NpSlot &subj = nps_[subject];
    // Heavy new subjects tend to form their own phrase; a given long subject
    // never does, so its phrase always has a later word to carry the nucleus.
    double split = subj.is_long ? (subj.given ? 0.0 : 0.8) : 0.25;
    if (Chance(split)) words_.back().boundary = true;
    Push(Pick(kVerbs), "VB", sent);
    words_.back().accent = Chance(0.5);
    if (Chance(0.3)) Push(Pick(kPrepositions), "IN", sent);
    int object = MakeNp(sent);
    const NpSlot &obj = nps_[object];
    if (obj.given && obj.is_long) {
      Push(Pick(kFillers), "RB", sent);
      words_.back().accent = true;
      words_.back().pinned = true;
    } else if (Chance(0.5)) {
      Push(Pick(kFillers), "RB", sent);
      words_.back().accent = Chance(0.4);
    }
    words_.back().boundary = true;
    ShapePhrases(first, {subject, object});
  }

  const NpSlot *SlotAt(int token, const std::vector<int> &slots) const {
    for (int s : slots) {
      if (nps_[s].start <= token && token <= nps_[s].end) return &nps_[s];
    }
    return nullptr;
  }

  // Post-focal deaccenting: after the last new NP of a phrase, non-NP words
  // and given short NPs lose their accents. Given long NPs keep their
  // accents but never carry the nuclear one.
  void ShapePhrases(int first, const std::vector<int> &slots) {
    const int last = static_cast<int>(words_.size()) - 1;
    int phrase_start = first;
    for (int i = first; i <= last; ++i) {
      if (!words_[i].boundary) continue;
      int focus_end = -1;
      for (int s : slots) {
        const NpSlot &np = nps_[s];
        if (!np.given && np.start >= phrase_start && np.end <= i) {
          focus_end = std::max(focus_end, np.end);
        }
      }
      for (int j = focus_end + 1; focus_end >= 0 && j <= i; ++j) {
        const NpSlot *np = SlotAt(j, slots);
        if (words_[j].pinned || (np && np->is_long)) continue;
        words_[j].accent = false;
      }
      int nucleus = -1;
      for (int j = phrase_start; j <= i; ++j) {
        if (words_[j].accent) nucleus = j;
      }
      const NpSlot *np = nucleus >= 0 ? SlotAt(nucleus, slots) : nullptr;
      if (np && np->given && np->is_long) {
        for (int j = np->end + 1; j <= i; ++j) {
          if (!words_[j].in_np) {
            words_[j].accent = true;
            break;
          }
        }
      }
      phrase_start = i + 1;
    }
  }

  const GenConfig &cfg_;
  std::mt19937_64 &rng_;
  std::vector<Entity> entities_;
  std::vector<int> recent_;
};

int Syllables(const std::string &form) {
  int count = 0;
  bool prev_vowel = false;
  for (char c : form) {
    bool vowel = std::string("aeiouyAEIOUY").find(c) != std::string::npos;
    if (vowel && !prev_vowel) ++count;
    prev_vowel = vowel;
  }
  return std::max(1, count);
}

double Round4(double t) { return std::round(t * 10000.0) / 10000.0; }

// Lays out word timings and renders the waveform.
AudioSignal Render(const GenConfig &cfg, std::vector<Token> *tokens,
                   std::mt19937_64 &rng, bool synthesize) {
  std::uniform_real_distribution<double> jitter(0.9, 1.1);
  const double base_f0 =
      std::uniform_real_distribution<double>(100.0, 160.0)(rng);
  double t = kLeadSilence;
  struct Shape {
    double f0;
    double amplitude;
  };
  std::vector<Shape> shapes;
  for (Token &tok : *tokens) {
    double dur = (0.12 + 0.07 * Syllables(tok.form)) * jitter(rng);
    if (tok.gold_boundary) dur *= 1.3;
    if (tok.gold_accent) dur *= 1.1;
    tok.start_time = Round4(t);
    tok.end_time = Round4(t + dur);
    t = tok.end_time + (tok.gold_boundary ? kBoundaryPause : kWordGap);
    shapes.push_back({base_f0 * std::uniform_real_distribution<double>(
                                    0.97, 1.03)(rng),
                      (tok.gold_accent ? 0.45 : 0.18) * jitter(rng)});
  }
  AudioSignal signal;
  signal.sample_rate = cfg.sample_rate;
  if (!synthesize) return signal;
  const double rate = cfg.sample_rate;
  signal.samples.assign(static_cast<size_t>(std::ceil((t + 0.1) * rate)), 0.0f);
  const double ramp = 0.010 * rate;
  for (size_t w = 0; w < tokens->size(); ++w) {
    const Token &tok = (*tokens)[w];
    size_t a = static_cast<size_t>(std::lround(tok.start_time * rate));
    size_t b = static_cast<size_t>(std::lround(tok.end_time * rate));
    const double n = static_cast<double>(b - a);
    double phase = 0;
    for (size_t k = a; k < b; ++k) {
      double tau = (k - a) / n;
      double f = shapes[w].f0;
      f *= tok.gold_accent ? 1.0 + 0.35 * std::sin(std::numbers::pi * tau)
                           : 1.0 - 0.05 * tau;
      double env = std::min({1.0, (k - a) / ramp, (b - k) / ramp});
      if (tok.gold_boundary) {
        f *= 1.0 - 0.3 * std::max(0.0, (tau - 0.5) / 0.5);
        if (tau > 0.7) env *= std::max(0.05, 1.0 - (tau - 0.7) / 0.3);
      }
      phase += 2 * std::numbers::pi * f / rate;
      double v = std::sin(phase) + 0.5 * std::sin(2 * phase) +
                 0.25 * std::sin(3 * phase);
      signal.samples[k] = static_cast<float>(shapes[w].amplitude * env * v / 1.75);
    }
  }
  std::normal_distribution<double> noise(0.0, 0.002);
  for (float &s : signal.samples) {
    s = static_cast<float>(std::clamp(s + noise(rng), -1.0, 1.0));
  }
  return signal;
}

void CheckProbability(double p, const char *name) {
  if (!(p >= 0 && p <= 1)) {
    throw ParseError(std::string(name) + " must be a probability in [0, 1]");
  }
}

void ValidateConfig(const GenConfig &cfg) {
  if (cfg.n_docs < 0) throw ParseError("n_docs must be >= 0");
  if (cfg.min_tokens < 1 || cfg.max_tokens < cfg.min_tokens) {
    throw ParseError("tokens_per_doc must be a range lo-hi with 1 <= lo <= hi");
  }
  CheckProbability(cfg.chain_rate, "chain_rate");
  CheckProbability(cfg.deaccent_given, "deaccent_given");
  CheckProbability(cfg.accent_new, "accent_new");
  CheckProbability(cfg.accent_flip_noise, "accent_flip_noise");
  CheckProbability(cfg.boundary_flip_noise, "boundary_flip_noise");
  CheckProbability(cfg.long_np_rate, "long_np_rate");
  CheckProbability(cfg.pronoun_rate, "pronoun_rate");
  CheckProbability(cfg.train_fraction, "train_fraction");
  CheckProbability(cfg.dev_fraction, "dev_fraction");
  if (cfg.train_fraction + cfg.dev_fraction > 1) {
    throw ParseError("train_fraction + dev_fraction exceeds 1");
  }
  if (cfg.noun_vocabulary < 1) throw ParseError("noun_vocabulary must be >= 1");
  if (cfg.sample_rate < 8000) throw ParseError("sample_rate must be >= 8000");
}

}  // namespace

GenConfig ParseGenConfig(const std::string &text) {
  GenConfig cfg;
  std::map<std::string, std::function<void(const std::string &)>> setters;
  auto num = [](auto *field) {
    return [field](const std::string &v) {
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), *field);
      if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ParseError("bad number '" + v + "'");
      }
    };
  };
  setters["n_docs"] = num(&cfg.n_docs);
  setters["min_tokens"] = num(&cfg.min_tokens);
  setters["max_tokens"] = num(&cfg.max_tokens);
  setters["tokens_per_doc"] = [&cfg, num](const std::string &v) {
    size_t dash = v.find('-');
    if (dash == std::string::npos) throw ParseError("tokens_per_doc is lo-hi");
    num(&cfg.min_tokens)(v.substr(0, dash));
    num(&cfg.max_tokens)(v.substr(dash + 1));
  };
  setters["chain_rate"] = num(&cfg.chain_rate);
  setters["deaccent_given"] = num(&cfg.deaccent_given);
  setters["accent_new"] = num(&cfg.accent_new);
  setters["accent_flip_noise"] = num(&cfg.accent_flip_noise);
  setters["boundary_flip_noise"] = num(&cfg.boundary_flip_noise);
  setters["long_np_rate"] = num(&cfg.long_np_rate);
  setters["pronoun_rate"] = num(&cfg.pronoun_rate);
  setters["noun_vocabulary"] = num(&cfg.noun_vocabulary);
  setters["seed"] = num(&cfg.seed);
  setters["sample_rate"] = num(&cfg.sample_rate);
  setters["train_fraction"] = num(&cfg.train_fraction);
  setters["dev_fraction"] = num(&cfg.dev_fraction);
  setters["synthesize_audio"] = [&cfg](const std::string &v) {
    if (v == "true" || v == "1") {
      cfg.synthesize_audio = true;
    } else if (v == "false" || v == "0") {
      cfg.synthesize_audio = false;
    } else {
      throw ParseError("synthesize_audio must be true or false");
    }
  };

  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  auto trim = [](std::string s) {
    const char *ws = " \t\r";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw ParseError("unknown key '" + key + "'", lineno);
    try {
      it->second(value);
    } catch (const ParseError &e) {
      throw ParseError(key + ": " + e.what(), lineno);
    }
  }
  ValidateConfig(cfg);
  return cfg;
}

std::string FormatGenConfig(const GenConfig &cfg) {
  std::ostringstream out;
  out << "n_docs = " << cfg.n_docs << "\n"
      << "tokens_per_doc = " << cfg.min_tokens << "-" << cfg.max_tokens << "\n"
      << "chain_rate = " << FormatDouble(cfg.chain_rate) << "\n"
      << "deaccent_given = " << FormatDouble(cfg.deaccent_given) << "\n"
      << "accent_new = " << FormatDouble(cfg.accent_new) << "\n"
      << "accent_flip_noise = " << FormatDouble(cfg.accent_flip_noise) << "\n"
      << "boundary_flip_noise = " << FormatDouble(cfg.boundary_flip_noise)
      << "\n"
      << "long_np_rate = " << FormatDouble(cfg.long_np_rate) << "\n"
      << "pronoun_rate = " << FormatDouble(cfg.pronoun_rate) << "\n"
      << "noun_vocabulary = " << cfg.noun_vocabulary << "\n"
      << "seed = " << cfg.seed << "\n"
      << "sample_rate = " << cfg.sample_rate << "\n"
      << "synthesize_audio = " << (cfg.synthesize_audio ? "true" : "false")
      << "\n"
      << "train_fraction = " << FormatDouble(cfg.train_fraction) << "\n"
      << "dev_fraction = " << FormatDouble(cfg.dev_fraction) << "\n";
  return out.str();
}

GeneratedCorpus Generate(const GenConfig &cfg) {
  ValidateConfig(cfg);
  GeneratedCorpus out;
  for (int d = 0; d < cfg.n_docs; ++d) {
    std::mt19937_64 rng = MakeRng(cfg.seed, 0, d);
    int target = std::uniform_int_distribution<int>(cfg.min_tokens,
                                                    cfg.max_tokens)(rng);
    DocumentGenerator gen(cfg, &rng);
    gen.Run(target);

    Document doc;
    char id[32];
    std::snprintf(id, sizeof(id), "doc%04d", d);
    doc.doc_id = id;
    int tok_in_sent = 0;
    for (size_t i = 0; i < gen.words_.size(); ++i) {
      if (i > 0 && gen.sentence_of_[i] != gen.sentence_of_[i - 1]) {
        tok_in_sent = 0;
      }
      Token t;
      t.doc_id = doc.doc_id;
      t.sent_idx = gen.sentence_of_[i];
      t.tok_idx = tok_in_sent++;
      t.form = gen.words_[i].form;
      t.pos = gen.words_[i].pos;
      t.gold_accent = gen.words_[i].accent;
      t.gold_boundary = gen.words_[i].boundary;
      doc.tokens.push_back(std::move(t));
    }
    for (const NpSlot &np : gen.nps_) {
      doc.nps.push_back({np.start, np.end, np.chain});
    }
    CanonicalizeNps(&doc.nps);
    std::mt19937_64 audio_rng = MakeRng(cfg.seed, 1, d);
    AudioSignal audio = Render(cfg, &doc.tokens, audio_rng, cfg.synthesize_audio);
    ValidateDocument(doc);
    out.docs.push_back(std::move(doc));
    if (cfg.synthesize_audio) out.audio.push_back(std::move(audio));
  }
  CorruptLabels(&out.docs, cfg.accent_flip_noise, cfg.boundary_flip_noise,
                cfg.seed);
  return out;
}

void CorruptLabels(std::vector<Document> *docs, double accent_flip,
                   double boundary_flip, uint64_t seed) {
  if (!(accent_flip >= 0 && accent_flip <= 1) ||
      !(boundary_flip >= 0 && boundary_flip <= 1)) {
    throw InvalidArgument("flip probabilities must lie in [0, 1]");
  }
  for (size_t d = 0; d < docs->size(); ++d) {
    std::mt19937_64 rng = MakeRng(seed, 2, d);
    std::uniform_real_distribution<double> u(0, 1);
    for (Token &t : (*docs)[d].tokens) {
      bool flip_accent = u(rng) < accent_flip;
      bool flip_boundary = u(rng) < boundary_flip;
      t.pred_accent = t.gold_accent != flip_accent;
      t.pred_boundary = t.gold_boundary != flip_boundary;
    }
  }
}

CorpusSplit SplitCorpus(const std::vector<Document> &docs,
                        double train_fraction, double dev_fraction) {
  const size_t n = docs.size();
  size_t n_train = static_cast<size_t>(std::lround(n * train_fraction));
  size_t n_dev = std::min(n - std::min(n, n_train),
                          static_cast<size_t>(std::lround(n * dev_fraction)));
  n_train = std::min(n, n_train);
  CorpusSplit split;
  split.train.assign(docs.begin(), docs.begin() + n_train);
  split.dev.assign(docs.begin() + n_train, docs.begin() + n_train + n_dev);
  split.test.assign(docs.begin() + n_train + n_dev, docs.end());
  return split;
}

void WriteGeneratedCorpus(const GenConfig &cfg, const GeneratedCorpus &corpus,
                          const std::string &out_dir) {
  namespace fs = std::filesystem;
  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
  SerializeCorpus(corpus.docs, (dir / "corpus.tsv").string());
  CorpusSplit split =
      SplitCorpus(corpus.docs, cfg.train_fraction, cfg.dev_fraction);
  SerializeCorpus(split.train, (dir / "train.tsv").string());
  SerializeCorpus(split.dev, (dir / "dev.tsv").string());
  SerializeCorpus(split.test, (dir / "test.tsv").string());
  WriteFile((dir / "config.txt").string(), FormatGenConfig(cfg));
  if (corpus.audio.empty()) return;
  fs::create_directories(dir / "audio", ec);
  if (ec) throw IoError("cannot create audio directory: " + ec.message());
  std::map<std::string, std::string> manifest;
  for (size_t d = 0; d < corpus.docs.size(); ++d) {
    std::string rel = "audio/" + corpus.docs[d].doc_id + ".wav";
    WriteWav(corpus.audio[d], (dir / rel).string());
    manifest[corpus.docs[d].doc_id] = rel;
  }
  WriteManifest(manifest, (dir / "manifest.tsv").string());
}

}  // namespace prosocoref
