// src/pipeline/system.cc

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

#include "segaw/pipeline/system.h"

#include <algorithm>
#include <map>

#include "segaw/match/matching.h"

namespace segaw {

BoundarySet SsaeSystem::segment(const FeatureMatrix& f) const {
  const GasSequence g = extract_gas(gas, f);
  return actions_to_boundaries(rollout(ssae, f, g, DecodeMode::kGreedy).actions);
}

SsaeSystem::Embedded SsaeSystem::embed(const FeatureMatrix& f) const {
  Embedded e;
  e.boundaries = segment(f);
  e.embeddings = encode_segments(ssae, f, e.boundaries);
  return e;
}

std::vector<StdQuery> sample_queries(std::span<const SynthUtterance> source,
                                     std::span<const SynthUtterance> documents,
                                     int num_words, int per_word, Rng& rng) {
  struct Occurrence {
    int utterance, segment;
  };
  std::map<int, std::vector<Occurrence>> occurrences;
  for (int u = 0; u < static_cast<int>(source.size()); ++u)
    for (int s = 0; s < static_cast<int>(source[u].word_ids.size()); ++s)
      occurrences[source[u].word_ids[s]].push_back({u, s});
  std::set<int> in_docs;
  for (const auto& d : documents) in_docs.insert(d.word_ids.begin(), d.word_ids.end());
  std::vector<int> candidates;
  for (const auto& [w, occ] : occurrences)
    if (static_cast<int>(occ.size()) >= per_word && in_docs.count(w)) candidates.push_back(w);
  if (static_cast<int>(candidates.size()) < num_words)
    throw InputError("sample_queries: only " + std::to_string(candidates.size()) +
                     " words qualify as queries");
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(static_cast<std::size_t>(num_words));
  std::sort(candidates.begin(), candidates.end());

  std::vector<StdQuery> queries;
  for (int w : candidates) {
    std::vector<Occurrence> occ = occurrences[w];
    std::shuffle(occ.begin(), occ.end(), rng);
    for (int k = 0; k < per_word; ++k) {
      const SynthUtterance& u = source[static_cast<std::size_t>(occ[k].utterance)];
      const Segment seg = u.boundaries.segment(occ[k].segment);
      StdQuery q;
      q.word_id = w;
      q.id = "q" + std::to_string(w) + "_" + std::to_string(k);
      q.features.id = q.id;
      q.features.frames = u.features.frames.middleRows(seg.begin, seg.length());
      queries.push_back(std::move(q));
    }
  }
  return queries;
}

std::vector<std::set<std::string>> query_relevance(std::span<const StdQuery> queries,
                                                   std::span<const SynthUtterance> documents) {
  std::vector<int> ids;
  for (const auto& q : queries) ids.push_back(q.word_id);
  const auto table = relevance_table(documents, ids);
  std::vector<std::set<std::string>> out;
  for (const auto& rel : table) {
    std::set<std::string> s;
    for (int d : rel) s.insert(documents[static_cast<std::size_t>(d)].features.id);
    out.push_back(std::move(s));
  }
  return out;
}

MapReport score_map(const Matrix& scores, const std::vector<std::string>& doc_ids,
                    const std::vector<std::set<std::string>>& relevant) {
  if (scores.cols() != static_cast<Eigen::Index>(doc_ids.size()) ||
      scores.rows() != static_cast<Eigen::Index>(relevant.size()))
    throw ShapeError("score_map: score matrix does not match queries and documents");
  std::vector<std::vector<std::string>> rankings;
  for (Eigen::Index q = 0; q < scores.rows(); ++q) {
    std::vector<ScoredDoc> docs;
    for (Eigen::Index d = 0; d < scores.cols(); ++d)
      docs.push_back({doc_ids[static_cast<std::size_t>(d)], scores(q, d)});
    rankings.push_back(rank_documents(std::move(docs)));
  }
  return mean_average_precision(rankings, relevant);
}

Matrix embedding_scores(std::span<const EmbeddingSequence> queries,
                        std::span<const EmbeddingSequence> documents) {
  Matrix s(queries.size(), documents.size());
  for (std::size_t q = 0; q < queries.size(); ++q)
    for (std::size_t d = 0; d < documents.size(); ++d)
      s(q, d) = subsequence_score(queries[q], documents[d]).score;
  return s;
}

Matrix dtw_scores(std::span<const StdQuery> queries,
                  std::span<const SynthUtterance> documents) {
  Matrix s(queries.size(), documents.size());
  for (std::size_t q = 0; q < queries.size(); ++q)
    for (std::size_t d = 0; d < documents.size(); ++d)
      s(q, d) = dtw_score(queries[q].features.frames, documents[d].features.frames);
  return s;
}

}  // namespace segaw
