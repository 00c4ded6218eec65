// include/segaw/match/matching.h

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

#include <vector>

#include "segaw/model/ssae.h"

namespace segaw {

// Cosine similarity; 0 when either vector is zero.  Throws ShapeError on a
// size mismatch.
double cosine_sim(const Vector& a, const Vector& b);

struct MatchResult {
  double score = 0.0;
  int best_offset = -1;  // 0-based start of the best window, -1 if none
  std::vector<double> offset_scores;
};

// Segment-based subsequence matching: every window of N_q consecutive
// document segments scores the product of clamped cosine similarities with
// the query segments; the document score is the best window.
MatchResult subsequence_score(const EmbeddingSequence& query,
                              const EmbeddingSequence& doc);

// Subsequence DTW over frames with steps (1,0), (0,1), (1,1) and local cost
// 1 - cosine clamped to [0, 1].  Among optimal-cost paths the shortest is
// taken.  Returns 1 - cost / path length.
double dtw_score(const RowMatrix& query, const RowMatrix& doc);

}  // namespace segaw
