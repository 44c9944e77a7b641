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

#include <filesystem>
#include <string>

#include "doctest.h"
#include "prosocoref/corpus.h"
#include "prosocoref/errors.h"
#include "prosocoref/synth.h"

using namespace prosocoref;

namespace {

const char kTwoTokens[] =
    "#begin document d1\n"
    "d1\t0\t0\tBerlin\tNE\t0\t0.3\t(1)\t1\t0\t-\t-\n"
    "d1\t0\t1\tsleeps\tVB\t0.3\t0.7\t-\t0\t1\t-\t-\n"
    "#end document\n";

std::string TwoTokensWith(const std::string &line0) {
  return std::string("#begin document d1\n") + line0 +
         "d1\t0\t1\tsleeps\tVB\t0.3\t0.7\t-\t0\t1\t-\t-\n#end document\n";
}

std::string TempPath(const std::string &name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("minimal document has one chain of one mention") {
  auto docs = ParseCorpusText(kTwoTokens);
  REQUIRE(docs.size() == 1);
  const Document &d = docs[0];
  CHECK(d.doc_id == "d1");
  REQUIRE(d.tokens.size() == 2);
  CHECK(d.tokens[0].form == "Berlin");
  CHECK(d.tokens[0].gold_accent);
  CHECK(d.tokens[1].gold_boundary);
  CHECK_FALSE(d.tokens[0].pred_accent.has_value());
  REQUIRE(d.nps.size() == 1);
  CHECK(d.nps[0] == NounPhrase{0, 0, 1});
  auto chains = GoldChains(d);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].size() == 1);
}

TEST_CASE("canonical text round-trips byte for byte") {
  CHECK(SerializeCorpusText(ParseCorpusText(kTwoTokens)) == kTwoTokens);

  const std::string nested =
      "#begin document x\n"
      "x\t0\t0\tthe\tDT\t0\t0.1\t(0\t0\t0\t0\t1\n"
      "x\t0\t1\tbig\tJJ\t0.1\t0.2\t(2\t1\t0\t1\t-\n"
      "x\t0\t2\thouse\tNN\t0.2\t0.5\t(*)|2)|0)\t0\t1\t0\t1\n"
      "\n"
      "x\t1\t0\tit\tPRP\t0.6\t0.7\t(0)\t0\t1\t-\t-\n"
      "#end document\n";
  auto docs = ParseCorpusText(nested);
  REQUIRE(docs[0].nps.size() == 4);
  CHECK(docs[0].nps[0] == NounPhrase{0, 2, 0});
  CHECK(docs[0].nps[1] == NounPhrase{1, 2, 2});
  CHECK(docs[0].nps[2] == NounPhrase{2, 2, std::nullopt});
  CHECK(docs[0].tokens[1].pred_accent == true);
  CHECK(docs[0].tokens[3].sent_idx == 1);
  CHECK(SerializeCorpusText(docs) == nested);
}

TEST_CASE("malformed input names the offending line") {
  SUBCASE("end before start") {
    auto text = TwoTokensWith("d1\t0\t0\tBerlin\tNE\t0.5\t0.3\t(1)\t1\t0\t-\t-\n");
    try {
      ParseCorpusText(text);
      FAIL("expected a parse error");
    } catch (const ParseError &e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).find("timing error") != std::string::npos);
    }
  }
  SUBCASE("wrong column count") {
    auto text = TwoTokensWith("d1\t0\t0\tBerlin\tNE\t0\t0.3\t(1)\t1\t0\t-\n");
    CHECK_THROWS_AS(ParseCorpusText(text), ParseError);
  }
  SUBCASE("bad flag") {
    auto text = TwoTokensWith("d1\t0\t0\tBerlin\tNE\t0\t0.3\t(1)\t2\t0\t-\t-\n");
    CHECK_THROWS_AS(ParseCorpusText(text), ParseError);
  }
  SUBCASE("unclosed bracket") {
    auto text = TwoTokensWith("d1\t0\t0\tBerlin\tNE\t0\t0.3\t(1\t1\t0\t-\t-\n");
    CHECK_THROWS_AS(ParseCorpusText(text), ParseError);
  }
  SUBCASE("overlapping timing") {
    auto text = TwoTokensWith("d1\t0\t0\tBerlin\tNE\t0\t0.5\t(1)\t1\t0\t-\t-\n");
    CHECK_THROWS_AS(ParseCorpusText(text), ParseError);
  }
  SUBCASE("missing end marker") {
    CHECK_THROWS_AS(ParseCorpusText("#begin document a\n"), ParseError);
  }
}

TEST_CASE("partial NP overlap is rejected") {
  const std::string text =
      "#begin document x\n"
      "x\t0\t0\ta\tDT\t0\t0.1\t(1\t0\t0\t-\t-\n"
      "x\t0\t1\tb\tNN\t0.1\t0.2\t(2\t0\t0\t-\t-\n"
      "x\t0\t2\tc\tNN\t0.2\t0.3\t1)\t0\t0\t-\t-\n"
      "x\t0\t3\td\tNN\t0.3\t0.4\t2)\t0\t0\t-\t-\n"
      "#end document\n";
  CHECK_THROWS(ParseCorpusText(text));
}

TEST_CASE("NP crossing a sentence boundary is rejected") {
  Document d;
  d.doc_id = "x";
  d.tokens = {{"x", 0, 0, "a", "NN", 0, 0.1}, {"x", 1, 0, "b", "NN", 0.1, 0.2}};
  d.nps = {{0, 1, 0}};
  CHECK_THROWS_AS(ValidateDocument(d), InvalidArgument);
}

TEST_CASE("serialization details") {
  CHECK(SerializeCorpusText({}).empty());
  auto docs = ParseCorpusText(kTwoTokens);
  docs[0].tokens[0].pred_accent = false;
  docs[0].tokens[0].pred_boundary = true;
  std::string text = SerializeCorpusText(docs);
  CHECK(text.find("(1)\t1\t0\t0\t1\n") != std::string::npos);

  const std::string path = TempPath("prosocoref_corpus_test.tsv");
  SerializeCorpus(docs, path);
  CHECK(ParseCorpus(path) == docs);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(SerializeCorpus(docs, "/nonexistent-dir/x.tsv"), IoError);
}

TEST_CASE("round trip on a generated corpus") {
  GenConfig cfg;
  cfg.n_docs = 100;
  cfg.synthesize_audio = false;
  auto corpus = Generate(cfg);
  auto text = SerializeCorpusText(corpus.docs);
  auto parsed = ParseCorpusText(text);
  CHECK(parsed == corpus.docs);
  CHECK(SerializeCorpusText(parsed) == text);
}

TEST_CASE("word frame ranges") {
  Token t;
  t.start_time = 0.0;
  t.end_time = 0.30;
  CHECK(WordFrameRange(t, 0.01, 1000) == FrameRange{0, 30});
  t.start_time = 0.095;
  t.end_time = 0.105;
  CHECK(WordFrameRange(t, 0.01, 1000) == FrameRange{9, 10});
  t.start_time = 12.0;
  t.end_time = 12.5;
  CHECK(WordFrameRange(t, 0.01, 99) == FrameRange{98, 99});
  t.start_time = 0.101;
  t.end_time = 0.104;
  CHECK(WordFrameRange(t, 0.01, 99).size() == 1);
  CHECK_THROWS_AS(WordFrameRange(t, 0.0, 99), InvalidArgument);
}

TEST_CASE("word frame ranges are monotone and never empty") {
  GenConfig cfg;
  cfg.n_docs = 20;
  cfg.synthesize_audio = false;
  for (const Document &d : Generate(cfg).docs) {
    const int n = static_cast<int>(d.tokens.back().end_time / 0.01) - 3;
    FrameRange prev{0, 0};
    for (const Token &t : d.tokens) {
      FrameRange r = WordFrameRange(t, 0.01, n);
      CHECK(r.size() >= 1);
      CHECK(r.begin >= prev.begin);
      CHECK(r.end >= prev.end);
      prev = r;
    }
  }
}

TEST_CASE("manifest paths resolve against the manifest directory") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "prosocoref_manifest_test";
  fs::create_directories(dir);
  const std::string path = (dir / "manifest.tsv").string();
  WriteFile(path, "d1\taudio/d1.wav\nd2\t/abs/d2.wav\n");
  auto m = ReadManifest(path);
  CHECK(m["d1"] == (dir / "audio/d1.wav").string());
  CHECK(m["d2"] == "/abs/d2.wav");
  std::vector<Document> docs(1);
  docs[0].doc_id = "d2";
  AttachAudio(m, &docs);
  CHECK(docs[0].audio_path == "/abs/d2.wav");
  WriteFile(path, "d1\n");
  CHECK_THROWS_AS(ReadManifest(path), ParseError);
  fs::remove_all(dir);
}

TEST_CASE("gold chains put chain-less NPs in singletons") {
  Document d;
  d.nps = {{0, 0, 3}, {1, 1, std::nullopt}, {2, 2, 3}};
  auto chains = GoldChains(d);
  REQUIRE(chains.size() == 2);
  CHECK(chains[0] == std::vector<int>{0, 2});
  CHECK(chains[1] == std::vector<int>{1});
}

TEST_CASE("FormatDouble is shortest and exact") {
  CHECK(FormatDouble(0.3) == "0.3");
  CHECK(FormatDouble(0) == "0");
  CHECK(std::stod(FormatDouble(0.1 + 0.2)) == 0.1 + 0.2);
}
