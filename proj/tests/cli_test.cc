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

// End-to-end runs of the command-line tool on a tiny generated corpus.

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "prosocoref/corpus.h"
#include "prosocoref/experiment.h"

namespace fs = std::filesystem;
using namespace prosocoref;

namespace {

struct Result {
  int status;
  std::string output;
};

Result Run(const std::string &args) {
  const std::string cmd = std::string(PROSOCOREF_CLI) + " " + args + " 2>&1";
  FILE *pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Workdir {
 public:
  Workdir() : path_(fs::temp_directory_path() / "prosocoref_cli_test") {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~Workdir() { fs::remove_all(path_); }
  std::string operator/(const std::string &name) const {
    return (path_ / name).string();
  }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("pipeline from generation to scoring") {
  Workdir dir;
  WriteFile(dir / "gen.txt",
            "n_docs = 12\ntokens_per_doc = 14-18\ntrain_fraction = 0.5\n"
            "dev_fraction = 0.25\n");
  Result r = Run("gen-corpus --config " + dir / "gen.txt" + " --out-dir " +
                 dir / "corpus");
  REQUIRE_MESSAGE(r.status == 0, r.output);
  CHECK(fs::exists(dir / "corpus/manifest.tsv"));
  CHECK(fs::exists(dir / "corpus/audio/doc0011.wav"));

  const std::string corpus = dir / "corpus/corpus.tsv";
  r = Run("extract-features --corpus " + corpus + " --out " + dir / "f.pcf");
  REQUIRE_MESSAGE(r.status == 0, r.output);

  for (const char *event : {"accent", "boundary"}) {
    r = Run(std::string("train-prosody --event ") + event + " --corpus " +
            corpus + " --feature-cache " + dir / "f.pcf" +
            " --epochs 2 --out " + dir / (std::string(event) + ".pmd"));
    REQUIRE_MESSAGE(r.status == 0, r.output);
    CHECK(r.output.find("epoch 2\tloss=") != std::string::npos);
  }
  r = Run("predict-prosody --model " + dir / "accent.pmd" + " --model " +
          dir / "boundary.pmd" + " --corpus " + corpus + " --out " +
          dir / "pred.tsv");
  REQUIRE_MESSAGE(r.status == 0, r.output);
  r = Run("eval-prosody --pred " + dir / "pred.tsv" + " --gold " + corpus);
  REQUIRE_MESSAGE(r.status == 0, r.output);
  CHECK(r.output.find("accent\taccuracy=") != std::string::npos);
  CHECK(r.output.find("boundary\taccuracy=") != std::string::npos);

  r = Run("corrupt-labels --corpus " + corpus +
          " --accent-flip 0 --boundary-flip 0 --out " + dir / "clean.tsv");
  REQUIRE_MESSAGE(r.status == 0, r.output);
  for (const Document &d : ParseCorpus(dir / "clean.tsv")) {
    for (const Token &t : d.tokens) CHECK(t.pred_accent == t.gold_accent);
  }

  r = Run("derive-nuclear --corpus " + corpus + " --source pred --out " +
          dir / "nuclear.tsv");
  REQUIRE_MESSAGE(r.status == 0, r.output);
  CHECK(ReadFile(dir / "nuclear.tsv").find("\t1\n") != std::string::npos);

  r = Run("train-coref --corpus " + dir / "corpus/train.tsv" +
          " --prosody nuclear --scope all --source pred --epochs 2 --out " +
          dir / "m.crm");
  REQUIRE_MESSAGE(r.status == 0, r.output);
  r = Run("predict-coref --model " + dir / "m.crm" + " --corpus " +
          dir / "corpus/test.tsv" + " --out " + dir / "resp.tsv");
  REQUIRE_MESSAGE(r.status == 0, r.output);
  r = Run("score --key " + dir / "corpus/test.tsv" + " --response " +
          dir / "resp.tsv");
  REQUIRE_MESSAGE(r.status == 0, r.output);
  CHECK(r.output.find("CoNLL") != std::string::npos);
  CHECK(r.output.find("conll=") != std::string::npos);

  WriteFile(dir / "spec.txt",
            "train = corpus/train.tsv\ndev = corpus/dev.tsv\n"
            "test = corpus/test.tsv\nepochs = 2\n");
  r = Run("run-experiments --spec " + dir / "spec.txt" + " --out " +
          dir / "table.txt");
  REQUIRE_MESSAGE(r.status == 0, r.output);
  CHECK(ReadFile(dir / "table.txt").rfind("Baseline", 0) == 0);
  CHECK(ParseResultRows(ReadFile(dir / "table.txt.rows.tsv")).size() == 13);
}

TEST_CASE("errors exit non-zero with a message") {
  Workdir dir;
  WriteFile(dir / "bad.tsv", "#begin document x\nnot a token line\n");
  Result r = Run("derive-nuclear --corpus " + dir / "bad.tsv" + " --out " +
                 dir / "o.tsv");
  CHECK(r.status == 1);
  CHECK(r.output.find("error: ") != std::string::npos);
  CHECK(r.output.find("line 2") != std::string::npos);
  CHECK(Run("no-such-command").status != 0);
}
