// tests/synth_test.cc

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

#include "doctest.h"
#include "segaw/synth/corpus.h"

using namespace segaw;

namespace {

SynthConfig small_config() {
  SynthConfig c;
  c.train_utterances = 30;
  c.test_utterances = 10;
  c.seed = 7;
  return c;
}

}  // namespace

TEST_CASE("generate_corpus shapes and ranges") {
  const SynthConfig c = small_config();
  const SynthCorpus corpus = generate_corpus(c);
  REQUIRE(corpus.lexicon.size() == 20);
  for (const auto& t : corpus.lexicon) {
    CHECK(t.rows() >= 8);
    CHECK(t.rows() <= 20);
    CHECK(t.cols() == 8);
  }
  CHECK(corpus.train.size() == 30);
  CHECK(corpus.test.size() == 10);
  for (const auto& u : corpus.train) {
    const int n = static_cast<int>(u.word_ids.size());
    CHECK(n >= 3);
    CHECK(n <= 8);
    CHECK(u.boundaries.num_segments() == n);
    CHECK(u.boundaries.num_frames() == u.features.num_frames());
    CHECK(u.features.dim() == 8);
    for (int k : u.word_ids) {
      CHECK(k >= 1);
      CHECK(k <= 20);
    }
    for (int s = 0; s < n; ++s) {
      const int L = static_cast<int>(corpus.lexicon[u.word_ids[s] - 1].rows());
      const int len = u.boundaries.segment(s).length();
      CHECK(len >= static_cast<int>(std::lround(L * 0.8)));
      CHECK(len <= static_cast<int>(std::lround(L * 1.25)));
    }
  }
  CHECK(corpus.train[0].features.id == "train0000");
  CHECK(corpus.test[3].features.id == "test0003");
}

TEST_CASE("generate_corpus is deterministic per seed") {
  SynthConfig c = small_config();
  const SynthCorpus a = generate_corpus(c);
  const SynthCorpus b = generate_corpus(c);
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].word_ids == b.train[i].word_ids);
    CHECK(a.train[i].features.frames == b.train[i].features.frames);
  }
  c.seed = 8;
  const SynthCorpus other = generate_corpus(c);
  CHECK(other.lexicon[0] != a.lexicon[0]);
}

TEST_CASE("noise-free unwarped utterances are template concatenations") {
  SynthConfig c = small_config();
  c.noise = 0.0;
  c.min_warp = c.max_warp = 1.0;
  const SynthCorpus corpus = generate_corpus(c);
  for (const auto& u : corpus.train) {
    for (int s = 0; s < u.boundaries.num_segments(); ++s) {
      const Segment seg = u.boundaries.segment(s);
      const RowMatrix& tpl = corpus.lexicon[u.word_ids[s] - 1];
      REQUIRE(seg.length() == tpl.rows());
      CHECK(u.features.frames.middleRows(seg.begin, seg.length()) == tpl);
    }
  }
}

TEST_CASE("time_warp") {
  RowMatrix x(5, 1);
  x << 0, 1, 2, 3, 4;
  CHECK(time_warp(x, 1.0) == x);
  const RowMatrix up = time_warp(x, 1.8);  // 9 frames
  REQUIRE(up.rows() == 9);
  for (int i = 0; i < 9; ++i) CHECK(up(i, 0) == doctest::Approx(0.5 * i));
  const RowMatrix down = time_warp(x, 0.6);  // 3 frames
  REQUIRE(down.rows() == 3);
  CHECK(down(0, 0) == 0.0);
  CHECK(down(1, 0) == 2.0);
  CHECK(down(2, 0) == 4.0);
}

TEST_CASE("relevance_table") {
  std::vector<SynthUtterance> docs(3);
  docs[0].word_ids = {1, 2, 3};
  docs[1].word_ids = {4, 4};
  docs[2].word_ids = {3, 5};
  const std::vector<int> queries = {3, 4, 9};
  const auto rel = relevance_table(docs, queries);
  CHECK(rel[0] == std::set<int>{0, 2});
  CHECK(rel[1] == std::set<int>{1});
  CHECK(rel[2].empty());
}

TEST_CASE("invalid synth configuration") {
  SynthConfig c;
  c.max_words = 2;
  CHECK_THROWS_AS(generate_corpus(c), ConfigError);
  c = SynthConfig{};
  c.noise = -1;
  CHECK_THROWS_AS(generate_corpus(c), ConfigError);
}

TEST_CASE("fixed word count per utterance") {
  SynthConfig c;
  c.min_words = c.max_words = 3;
  c.train_utterances = 100;
  c.test_utterances = 0;
  for (const auto& u : generate_corpus(c).train) CHECK(u.boundaries.num_segments() == 3);
}

TEST_CASE("relevance_table matches a direct scan") {
  const SynthCorpus corpus = generate_corpus(small_config());
  std::vector<int> queries;
  for (int k = 1; k <= 20; ++k) queries.push_back(k);
  const auto rel = relevance_table(corpus.test, queries);
  for (int k = 1; k <= 20; ++k)
    for (std::size_t d = 0; d < corpus.test.size(); ++d) {
      bool has = false;
      for (int w : corpus.test[d].word_ids) has = has || w == k;
      CHECK(has == (rel[k - 1].count(static_cast<int>(d)) == 1));
    }
}
