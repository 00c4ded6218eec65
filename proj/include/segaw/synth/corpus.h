// include/segaw/synth/corpus.h

// Copyright 2026  segaw authors

// See ../../../COPYING for clarification regarding multiple authors
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

#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "segaw/core/types.h"

namespace segaw {

// Synthetic corpus: word templates are smoothed Gaussian random walks in
// feature space; an utterance concatenates time-warped, noisy instances.
struct SynthConfig {
  int lexicon_size = 20;
  int dim = 8;
  int min_word_frames = 8;
  int max_word_frames = 20;
  int min_words = 3;
  int max_words = 8;
  double noise = 0.1;
  double min_warp = 0.8;
  double max_warp = 1.25;
  // Template start point ~ N(0, 1); per-frame step ~ N(0, template_step^2).
  double template_step = 0.3;
  int train_utterances = 500;
  int test_utterances = 100;
  std::uint64_t seed = 0;

  // Throws ConfigError on invalid ranges.
  void validate() const;
};

struct SynthUtterance {
  FeatureMatrix features;
  BoundarySet boundaries;
  std::vector<int> word_ids;  // in [1, K]
};

struct SynthCorpus {
  std::vector<RowMatrix> lexicon;  // template k-1 for word id k
  std::vector<SynthUtterance> train;
  std::vector<SynthUtterance> test;
};

std::vector<RowMatrix> make_lexicon(const SynthConfig& config);

// Linear time warp of a template to round(L * factor) frames (at least 1).
RowMatrix time_warp(const RowMatrix& frames, double factor);

SynthCorpus generate_corpus(const SynthConfig& config);

// Utterance indices whose word sequence contains each query id.
std::vector<std::set<int>> relevance_table(std::span<const SynthUtterance> docs,
                                           std::span<const int> query_ids);

// Mean number of word boundaries per frame over a set of utterances.
double word_rate(std::span<const SynthUtterance> utterances);

}  // namespace segaw
