// src/eval/metrics.cc

// Copyright 2026  segaw authors

// See ../../COPYING for clarification regarding multiple authors
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

#include "segaw/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace segaw {

SegmentationCounts& SegmentationCounts::operator+=(const SegmentationCounts& o) {
  hypothesized += o.hypothesized;
  reference += o.reference;
  matched += o.matched;
  return *this;
}

PrfReport prf_from_counts(const SegmentationCounts& counts) {
  PrfReport r;
  r.counts = counts;
  r.precision = counts.hypothesized > 0
                    ? static_cast<double>(counts.matched) / counts.hypothesized
                    : 0.0;
  r.recall = counts.reference > 0
                 ? static_cast<double>(counts.matched) / counts.reference
                 : 0.0;
  const double s = r.precision + r.recall;
  r.f1 = s > 0.0 ? 2.0 * r.precision * r.recall / s : 0.0;
  return r;
}

SegmentationCounts match_boundaries(const BoundarySet& hyp, const BoundarySet& ref,
                                    int tolerance) {
  if (hyp.num_frames() != ref.num_frames())
    throw ShapeError("segmentation_prf: boundary sets cover different lengths");
  const std::vector<int> h = hyp.interior(), r = ref.interior();
  struct Pair {
    int dist, i, j;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < static_cast<int>(h.size()); ++i)
    for (int j = 0; j < static_cast<int>(r.size()); ++j) {
      const int d = std::abs(h[i] - r[j]);
      if (d <= tolerance) pairs.push_back({d, i, j});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<bool> hu(h.size()), ru(r.size());
  SegmentationCounts c;
  c.hypothesized = static_cast<long>(h.size());
  c.reference = static_cast<long>(r.size());
  for (const Pair& p : pairs) {
    if (hu[p.i] || ru[p.j]) continue;
    hu[p.i] = ru[p.j] = true;
    ++c.matched;
  }
  return c;
}

PrfReport segmentation_prf(const BoundarySet& hyp, const BoundarySet& ref, int tolerance) {
  return prf_from_counts(match_boundaries(hyp, ref, tolerance));
}

PrfReport segmentation_prf(std::span<const BoundarySet> hyp,
                           std::span<const BoundarySet> ref, int tolerance) {
  if (hyp.size() != ref.size())
    throw ShapeError("segmentation_prf: hypothesis and reference counts differ");
  SegmentationCounts total;
  for (std::size_t i = 0; i < hyp.size(); ++i)
    total += match_boundaries(hyp[i], ref[i], tolerance);
  return prf_from_counts(total);
}

BoundarySet random_segment(int num_frames, double rate, Rng& rng) {
  if (num_frames < 1) throw InputError("random_segment: T must be >= 1");
  if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError("random_segment: rate must be in [0, 1]");
  std::bernoulli_distribution draw(rate);
  std::vector<int> interior;
  for (int t = 1; t < num_frames; ++t)
    if (draw(rng)) interior.push_back(t);
  return BoundarySet::from_interior(interior, num_frames);
}

BoundarySet random_segment(int num_frames, double rate, std::uint64_t seed) {
  Rng rng(seed);
  return random_segment(num_frames, rate, rng);
}

double average_precision(const std::vector<std::string>& ranking,
                         const std::set<std::string>& relevant) {
  if (relevant.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::unordered_set<std::string> seen;
  double sum = 0.0;
  long hits = 0;
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    if (!seen.insert(ranking[k]).second)
      throw InputError("mean_average_precision: document " + ranking[k] +
                       " ranked twice");
    if (relevant.count(ranking[k])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

MapReport mean_average_precision(const std::vector<std::vector<std::string>>& rankings,
                                 const std::vector<std::set<std::string>>& relevant) {
  if (rankings.size() != relevant.size())
    throw ShapeError("mean_average_precision: one relevance set per query required");
  MapReport r;
  double sum = 0.0;
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    const double ap = average_precision(rankings[q], relevant[q]);
    r.average_precisions.push_back(ap);
    if (!std::isnan(ap)) {
      sum += ap;
      ++r.scored_queries;
    }
  }
  r.map = r.scored_queries > 0 ? sum / r.scored_queries : 0.0;
  return r;
}

std::vector<std::string> rank_documents(std::vector<ScoredDoc> docs) {
  std::sort(docs.begin(), docs.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  std::vector<std::string> out;
  for (auto& d : docs) out.push_back(std::move(d.id));
  return out;
}

}  // namespace segaw
