// include/segaw/pipeline/system.h

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

#include <set>
#include <span>
#include <string>
#include <vector>

#include "segaw/eval/metrics.h"
#include "segaw/gas/gas.h"
#include "segaw/model/ssae.h"
#include "segaw/synth/corpus.h"

namespace segaw {

// A trained SSAE together with the GAS model that feeds its gate.
struct SsaeSystem {
  GasModel gas;
  SsaeParams ssae;

  // Greedy segmentation of an utterance.
  BoundarySet segment(const FeatureMatrix& f) const;

  struct Embedded {
    BoundarySet boundaries;
    EmbeddingSequence embeddings;
  };
  Embedded embed(const FeatureMatrix& f) const;
};

// A spoken query cut from an utterance with its reference boundaries.
struct StdQuery {
  std::string id;
  int word_id = 0;
  FeatureMatrix features;
};

// Picks num_words distinct word ids that occur at least per_word times in the
// source utterances and in at least one document, then cuts per_word random
// occurrences of each.
std::vector<StdQuery> sample_queries(std::span<const SynthUtterance> source,
                                     std::span<const SynthUtterance> documents,
                                     int num_words, int per_word, Rng& rng);

// scores is Q x D; ranks every query's documents (ties by id) and computes MAP.
MapReport score_map(const Matrix& scores, const std::vector<std::string>& doc_ids,
                    const std::vector<std::set<std::string>>& relevant);

// Relevant document ids of each query.
std::vector<std::set<std::string>> query_relevance(std::span<const StdQuery> queries,
                                                   std::span<const SynthUtterance> documents);

// Q x D matrix of subsequence-matching scores.
Matrix embedding_scores(std::span<const EmbeddingSequence> queries,
                        std::span<const EmbeddingSequence> documents);

// Q x D matrix of frame DTW relevances.
Matrix dtw_scores(std::span<const StdQuery> queries,
                  std::span<const SynthUtterance> documents);

}  // namespace segaw
