// src/match/matching.cc

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

#include "segaw/match/matching.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace segaw {

double cosine_sim(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw ShapeError("cosine_sim: sizes " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()));
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

MatchResult subsequence_score(const EmbeddingSequence& query,
                              const EmbeddingSequence& doc) {
  if (query.size() < 1) throw InputError("subsequence_score: empty query");
  if (doc.size() > 0 && query.dim() != doc.dim())
    throw ShapeError("subsequence_score: embedding dims differ");
  MatchResult r;
  const int nq = query.size(), nd = doc.size();
  if (nq > nd) return r;
  // Clamped similarity of every (query, doc) segment pair.
  Matrix sim(nq, nd);
  for (int m = 0; m < nq; ++m)
    for (int j = 0; j < nd; ++j)
      sim(m, j) = std::clamp(cosine_sim(query.vectors.row(m).transpose(),
                                        doc.vectors.row(j).transpose()),
                             0.0, 1.0);
  for (int n = 0; n + nq <= nd; ++n) {
    double s = 1.0;
    for (int m = 0; m < nq; ++m) s *= sim(m, n + m);
    r.offset_scores.push_back(s);
    if (r.best_offset < 0 || s > r.score) {
      r.score = s;
      r.best_offset = n;
    }
  }
  return r;
}

double dtw_score(const RowMatrix& query, const RowMatrix& doc) {
  const Eigen::Index tq = query.rows(), td = doc.rows();
  if (tq == 0 || td == 0) throw InputError("dtw_score: empty sequence");
  if (query.cols() != doc.cols()) throw ShapeError("dtw_score: feature dims differ");
  // Unit-normalize rows so the local cost is one matrix product.
  auto normalize = [](const RowMatrix& m) {
    RowMatrix out = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double n = m.row(i).norm();
      if (n > 0.0) out.row(i) /= n;
      else out.row(i).setZero();
    }
    return out;
  };
  const Matrix cost =
      (1.0 - (normalize(query) * normalize(doc).transpose()).array()).cwiseMax(0.0).cwiseMin(1.0);

  // (cost, length) compared lexicographically.
  struct Cell {
    double cost;
    long len;
    bool operator<(const Cell& o) const {
      return cost < o.cost || (cost == o.cost && len < o.len);
    }
  };
  std::vector<Cell> prev(static_cast<std::size_t>(td)), cur(static_cast<std::size_t>(td));
  // Free start anywhere in the document.  Horizontal moves in the first row
  // never beat starting fresh, since costs are non-negative.
  for (Eigen::Index j = 0; j < td; ++j) prev[j] = {cost(0, j), 1};
  for (Eigen::Index i = 1; i < tq; ++i) {
    for (Eigen::Index j = 0; j < td; ++j) {
      Cell best = prev[j];  // (1, 0)
      if (j > 0) {
        best = std::min(best, prev[j - 1]);  // (1, 1)
        best = std::min(best, cur[j - 1]);   // (0, 1)
      }
      cur[j] = {best.cost + cost(i, j), best.len + 1};
    }
    std::swap(prev, cur);
  }
  const Cell best = *std::min_element(prev.begin(), prev.end());
  return 1.0 - best.cost / static_cast<double>(best.len);
}

}  // namespace segaw
