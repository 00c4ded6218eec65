// tests/cli_test.cc

// Copyright 2026  segaw authors

// See ../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <sstream>

#include "cli.h"
#include "doctest.h"
#include "segaw/features/wav.h"
#include "segaw/io/binary.h"
#include "segaw/io/formats.h"

using namespace segaw;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  const auto b = read_file(p.string());
  return {b.begin(), b.end()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("segaw_cli_test_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& f) const { return (path_ / f).string(); }

 private:
  fs::path path_;
};

const char* kSmallTrain =
    "outer_iterations = 1\nphase1_epochs = 1\nphase2_epochs = 1\nencoder_hidden = 6\n"
    "decoder_hidden = 6\ngate_hidden = 6\ngate_layers = 1\nlambda = 500\nbatch_size = 8\n";

// synth, train-gas and train at toy scale into dir.
void build_models(const TempDir& dir) {
  REQUIRE(run({"synth", "--seed", "7", "--out", dir / "corpus", "--train-utterances", "16",
               "--test-utterances", "8"}).status == 0);
  REQUIRE(run({"train-gas", "--seed", "1", "--manifest", dir / "corpus/train.manifest", "--out",
               dir / "gas.ck", "--gas-dim", "6", "--epochs", "1"}).status == 0);
  atomic_write_file(dir / "small.conf", std::string(kSmallTrain));
  const Run t = run({"train", "--seed", "1", "--manifest", dir / "corpus/train.manifest", "--gas",
                     dir / "gas.ck", "--out", dir / "ssae.ck", "--config", dir / "small.conf"});
  REQUIRE_MESSAGE(t.status == 0, t.err);
}

}  // namespace

TEST_CASE("synth is deterministic per seed") {
  TempDir dir("synth");
  const Run a = run({"synth", "--seed", "7", "--out", dir / "a", "--train-utterances", "5",
                     "--test-utterances", "2"});
  const Run b = run({"synth", "--seed", "7", "--out", dir / "b", "--train-utterances", "5",
                     "--test-utterances", "2"});
  const Run c = run({"synth", "--seed", "8", "--out", dir / "c", "--train-utterances", "5",
                     "--test-utterances", "2"});
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  CHECK(a.out.find("manifest_digest = ") != std::string::npos);
  CHECK(slurp(dir / "a/train.manifest") == slurp(dir / "b/train.manifest"));
  CHECK(slurp(dir / "a/train0003.feat") == slurp(dir / "b/train0003.feat"));
  const auto m = load_manifest(dir / "a/train.manifest");
  REQUIRE(m.size() == 5);
  CHECK(load_features(dir / "a/train0000.feat", "x").num_frames() == m[0].boundaries.num_frames());
}

TEST_CASE("usage and configuration errors") {
  TempDir dir("usage");
  CHECK(run({}).status == 2);
  CHECK(run({"synth", "--out", dir / "x"}).status == 2);  // no seed
  CHECK(run({"gradcheck"}).status == 2);
  atomic_write_file(dir / "bad.conf", std::string("no_such_key = 1\n"));
  const Run r = run({"synth", "--seed", "1", "--out", dir / "x", "--config", dir / "bad.conf"});
  CHECK(r.status == 2);
  CHECK(r.err.find("no_such_key") != std::string::npos);
  CHECK(run({"synth", "--help"}).status == 0);
}

TEST_CASE("flags override the config file") {
  TempDir dir("override");
  atomic_write_file(dir / "c.conf", std::string("train_utterances = 3\ntest_utterances = 2\n"));
  const Run a = run({"synth", "--seed", "1", "--out", dir / "a", "--config", dir / "c.conf"});
  CHECK(a.out.find("train_utterances = 3") != std::string::npos);
  const Run b = run({"synth", "--seed", "1", "--out", dir / "b", "--config", dir / "c.conf",
                     "--train-utterances", "4"});
  CHECK(b.out.find("train_utterances = 4") != std::string::npos);
}

TEST_CASE("featurize") {
  TempDir dir("featurize");
  WavAudio a;
  for (int i = 0; i < 16000; ++i)
    a.samples.push_back(static_cast<std::int16_t>(8000 * std::sin(i * 0.1) * std::sin(i * 0.0007)));
  write_wav(dir / "a.wav", a);
  atomic_write_file(dir / "list.txt", std::string("utt1 a.wav\n"));
  const Run r = run({"featurize", "--list", dir / "list.txt", "--out", dir / "feats"});
  REQUIRE_MESSAGE(r.status == 0, r.err);
  const FeatureMatrix f = load_features(dir / "feats/utt1.feat", "utt1");
  CHECK(f.num_frames() == 98);
  CHECK(f.dim() == 39);
  const auto m = load_manifest(dir / "feats/features.manifest");
  REQUIRE(m.size() == 1);
  CHECK(m[0].boundaries.num_frames() == 98);

  WavAudio slow = a;
  slow.sample_rate = 8000;
  write_wav(dir / "a.wav", slow);
  CHECK(run({"featurize", "--list", dir / "list.txt", "--out", dir / "feats"}).status == 1);
}

TEST_CASE("full pipeline and output contracts") {
  TempDir dir("pipeline");
  build_models(dir);

  const Run seg = run({"segment", "--model", dir / "ssae.ck", "--manifest", dir / "corpus/test.manifest",
                       "--out", dir / "seg.txt"});
  REQUIRE(seg.status == 0);
  const auto test_manifest = load_manifest(dir / "corpus/test.manifest");
  std::istringstream lines(slurp(dir / "seg.txt"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto a = line.find('\t'), b = line.find('\t', a + 1);
    REQUIRE(b != std::string::npos);
    const auto parsed = parse_manifest(line.substr(0, b) + "\t\n");
    CHECK(parsed[0].id == test_manifest[n].id);
    CHECK(parsed[0].boundaries.num_frames() == test_manifest[n].boundaries.num_frames());
    const std::string secs = line.substr(b + 1);
    const int last = parsed[0].boundaries.ends().back();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", last * 0.01);
    CHECK(secs.substr(secs.rfind(',') == std::string::npos ? 0 : secs.rfind(',') + 1) == buf);
    ++n;
  }
  CHECK(n == test_manifest.size());

  const Run es = run({"eval-seg", "--manifest", dir / "corpus/test.manifest", "--hyp", dir / "seg.txt"});
  REQUIRE(es.status == 0);
  CHECK(es.out.find("f1 = ") != std::string::npos);

  REQUIRE(run({"embed", "--model", dir / "ssae.ck", "--manifest", dir / "corpus/test.manifest", "--out",
               dir / "idx"}).status == 0);
  const Run s = run({"search", "--model", dir / "ssae.ck", "--index", dir / "idx", "--query",
                     dir / "corpus/train0001.feat"});
  REQUIRE(s.status == 0);
  std::istringstream results(s.out);
  std::vector<std::pair<double, std::string>> rows;
  while (std::getline(results, line)) {
    std::istringstream ls(line);
    std::string id;
    double score;
    int offset;
    REQUIRE(static_cast<bool>(ls >> id >> score >> offset));
    CHECK(std::count(line.begin(), line.end(), '\t') == 2);
    rows.emplace_back(score, id);
  }
  CHECK(rows.size() == test_manifest.size());
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK((rows[i - 1].first > rows[i].first ||
           (rows[i - 1].first == rows[i].first && rows[i - 1].second < rows[i].second)));

  const Run std_eval = run({"eval-std", "--seed", "3", "--model", dir / "ssae.ck", "--index", dir / "idx",
                            "--queries-from", dir / "corpus/train.manifest", "--docs",
                            dir / "corpus/test.manifest", "--query-words", "2", "--queries-per-word", "1",
                            "--dtw", "--random"});
  REQUIRE_MESSAGE(std_eval.status == 0, std_eval.err);
  CHECK(std_eval.out.find("\nmap = ") != std::string::npos);
  CHECK(std_eval.out.find("map_dtw = ") != std::string::npos);

  // An index from another checkpoint is rejected.
  REQUIRE(run({"train", "--seed", "2", "--manifest", dir / "corpus/train.manifest", "--gas", dir / "gas.ck",
               "--out", dir / "other.ck", "--config", dir / "small.conf"}).status == 0);
  const Run bad = run({"search", "--model", dir / "other.ck", "--index", dir / "idx", "--query",
                       dir / "corpus/train0001.feat"});
  CHECK(bad.status == 1);
  CHECK(bad.err.find("index was built from checkpoint") != std::string::npos);
}

TEST_CASE("identical runs give identical artifacts") {
  TempDir a("determinism_a"), b("determinism_b");
  build_models(a);
  build_models(b);
  CHECK(slurp(a / "gas.ck") == slurp(b / "gas.ck"));
  CHECK(slurp(a / "ssae.ck") == slurp(b / "ssae.ck"));
  for (const TempDir* d : {&a, &b})
    REQUIRE(run({"embed", "--model", *d / "ssae.ck", "--manifest", *d / "corpus/test.manifest", "--out",
                 *d / "idx"}).status == 0);
  CHECK(slurp(a / "idx") == slurp(b / "idx"));
  const Run ra = run({"search", "--model", a / "ssae.ck", "--index", a / "idx", "--query", a / "corpus/train0002.feat"});
  const Run rb = run({"search", "--model", b / "ssae.ck", "--index", b / "idx", "--query", b / "corpus/train0002.feat"});
  CHECK(ra.out == rb.out);
}

TEST_CASE("gradcheck command") {
  const Run r = run({"gradcheck", "--seed", "5"});
  CHECK(r.status == 0);
  CHECK(r.out.find("status = pass") != std::string::npos);
  CHECK(run({"gradcheck", "--seed", "5", "--tolerance", "1e-12"}).status == 1);
}
