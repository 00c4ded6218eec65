// tests/pipeline_test.cc

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

#include <set>

#include "doctest.h"
#include "segaw/core/errors.h"
#include "segaw/match/matching.h"
#include "segaw/pipeline/experiment.h"
#include "segaw/pipeline/system.h"

using namespace segaw;

namespace {

SynthCorpus small_corpus(double noise, double warp_lo, double warp_hi) {
  SynthConfig c;
  c.train_utterances = 40;
  c.test_utterances = 15;
  c.noise = noise;
  c.min_warp = warp_lo;
  c.max_warp = warp_hi;
  c.seed = 9;
  return generate_corpus(c);
}

}  // namespace

TEST_CASE("sample_queries") {
  const SynthCorpus corpus = small_corpus(0.1, 0.8, 1.25);
  Rng rng(1);
  const auto queries = sample_queries(corpus.train, corpus.test, 4, 3, rng);
  REQUIRE(queries.size() == 12);
  std::set<int> words;
  std::set<std::string> ids;
  for (const auto& q : queries) {
    words.insert(q.word_id);
    ids.insert(q.id);
    CHECK(q.features.id == q.id);
    CHECK(q.features.dim() == 8);
    bool in_docs = false;
    for (const auto& d : corpus.test)
      for (int w : d.word_ids) in_docs = in_docs || w == q.word_id;
    CHECK(in_docs);
    // The query is an exact word slice of some training utterance.
    bool found = false;
    for (const auto& u : corpus.train)
      for (int s = 0; s < u.boundaries.num_segments(); ++s) {
        const Segment seg = u.boundaries.segment(s);
        if (u.word_ids[s] == q.word_id && seg.length() == q.features.num_frames() &&
            u.features.frames.middleRows(seg.begin, seg.length()) == q.features.frames)
          found = true;
      }
    CHECK(found);
  }
  CHECK(words.size() == 4);
  CHECK(ids.size() == 12);

  Rng again(1);
  const auto repeat = sample_queries(corpus.train, corpus.test, 4, 3, again);
  for (std::size_t i = 0; i < queries.size(); ++i) CHECK(repeat[i].features.frames == queries[i].features.frames);
  Rng r2(1);
  CHECK_THROWS_AS(sample_queries(corpus.train, corpus.test, 21, 1, r2), InputError);
}

TEST_CASE("query_relevance and score_map") {
  const SynthCorpus corpus = small_corpus(0.1, 0.8, 1.25);
  Rng rng(2);
  const auto queries = sample_queries(corpus.train, corpus.test, 3, 2, rng);
  const auto rel = query_relevance(queries, corpus.test);
  for (std::size_t q = 0; q < queries.size(); ++q)
    for (const auto& d : corpus.test) {
      bool has = false;
      for (int w : d.word_ids) has = has || w == queries[q].word_id;
      CHECK(has == (rel[q].count(d.features.id) == 1));
    }

  Matrix s(1, 4);
  s << 0.9, 0.1, 0.5, 0.5;
  const std::vector<std::string> ids = {"a", "b", "c", "d"};
  // Ranking a, c, d, b (tie c/d by id); relevant a and d at ranks 1 and 3.
  const MapReport m = score_map(s, ids, {{"a", "d"}});
  CHECK(m.map == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-15));
  CHECK_THROWS_AS(score_map(s, {"a"}, {{"a"}}), ShapeError);
}

TEST_CASE("identical word instances embed identically") {
  const SynthCorpus corpus = small_corpus(0.0, 1.0, 1.0);
  SsaeDims dims;
  dims.feature_dim = 8;
  dims.gas_dim = 4;
  dims.encoder_hidden = dims.decoder_hidden = 6;
  dims.gate_hidden = 4;
  dims.gate_layers = 1;
  Rng rng(3);
  const SsaeParams p = SsaeParams::initialized(dims, rng);
  Rng qrng(4);
  const auto queries = sample_queries(corpus.train, corpus.test, 3, 2, qrng);
  const auto rel = query_relevance(queries, corpus.test);
  int checked = 0;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const EmbeddingSequence qe =
        encode_segments(p, queries[q].features, BoundarySet::whole(queries[q].features.num_frames()));
    for (const auto& d : corpus.test) {
      if (!rel[q].count(d.features.id)) continue;
      const EmbeddingSequence de = encode_segments(p, d.features, d.boundaries);
      CHECK(subsequence_score(qe, de).score == doctest::Approx(1.0).epsilon(1e-12));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("SsaeSystem segments greedily") {
  const SynthCorpus corpus = small_corpus(0.1, 0.8, 1.25);
  SsaeSystem sys;
  Rng rng(5);
  sys.gas = GasModel(8, 4);
  sys.gas.initialize(rng);
  sys.gas.trained = true;
  SsaeDims dims;
  dims.feature_dim = 8;
  dims.gas_dim = 4;
  dims.encoder_hidden = dims.decoder_hidden = 5;
  dims.gate_hidden = 4;
  dims.gate_layers = 1;
  sys.ssae = SsaeParams::initialized(dims, rng);
  const FeatureMatrix& f = corpus.test[0].features;
  const auto g = extract_gas(sys.gas, f);
  const BoundarySet expected =
      actions_to_boundaries(rollout(sys.ssae, f, g, DecodeMode::kGreedy).actions);
  CHECK(sys.segment(f) == expected);
  const auto e = sys.embed(f);
  CHECK(e.boundaries == expected);
  CHECK(e.embeddings.size() == expected.num_segments());
}

TEST_CASE("experiment configuration checks") {
  ExperimentConfig c = desk_experiment_config(1);
  c.dims.gas_dim = 7;
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}
