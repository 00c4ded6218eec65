// include/segaw/eval/metrics.h

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
#include <string>
#include <vector>

#include "segaw/core/types.h"

namespace segaw {

struct SegmentationCounts {
  long hypothesized = 0;
  long reference = 0;
  long matched = 0;

  SegmentationCounts& operator+=(const SegmentationCounts& o);
};

struct PrfReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  SegmentationCounts counts;
};

PrfReport prf_from_counts(const SegmentationCounts& counts);

// Boundary matching within a tolerance (frames).  Candidate pairs are taken
// in order of increasing distance and accepted while both ends are free.  The
// utterance-final frame is never scored.
SegmentationCounts match_boundaries(const BoundarySet& hyp, const BoundarySet& ref,
                                    int tolerance);

PrfReport segmentation_prf(const BoundarySet& hyp, const BoundarySet& ref,
                           int tolerance = 4);

// Micro-averaged over utterances.
PrfReport segmentation_prf(std::span<const BoundarySet> hyp,
                           std::span<const BoundarySet> ref, int tolerance = 4);

// Independent Bernoulli(rate) boundary after each of frames 1..T-1.
BoundarySet random_segment(int num_frames, double rate, Rng& rng);
BoundarySet random_segment(int num_frames, double rate, std::uint64_t seed);

struct MapReport {
  double map = 0.0;
  std::vector<double> average_precisions;  // NaN for queries without relevant docs
  int scored_queries = 0;
};

double average_precision(const std::vector<std::string>& ranking,
                         const std::set<std::string>& relevant);

// rankings[q] lists doc ids best first.  Queries with no relevant document are
// excluded from the mean.  A repeated doc id in one ranking is an InputError.
MapReport mean_average_precision(const std::vector<std::vector<std::string>>& rankings,
                                 const std::vector<std::set<std::string>>& relevant);

struct ScoredDoc {
  std::string id;
  double score = 0.0;
};

// Descending score; ties by ascending id.
std::vector<std::string> rank_documents(std::vector<ScoredDoc> docs);

}  // namespace segaw
