// src/synth/corpus.cc

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

#include "segaw/synth/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace segaw {

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("synth: " + what); };
  if (lexicon_size < 2) fail("lexicon_size must be >= 2");
  if (dim < 1) fail("dim must be >= 1");
  if (min_word_frames < 3) fail("min_word_frames must be >= 3");
  if (max_word_frames < min_word_frames) fail("max_word_frames < min_word_frames");
  if (min_words < 1 || max_words < min_words) fail("invalid words-per-utterance range");
  if (!(noise >= 0.0)) fail("noise must be >= 0");
  if (!(min_warp > 0.0) || max_warp < min_warp) fail("invalid warp range");
  if (!(template_step >= 0.0)) fail("template_step must be >= 0");
  if (train_utterances < 0 || test_utterances < 0) fail("utterance counts must be >= 0");
}

std::vector<RowMatrix> make_lexicon(const SynthConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.seed, "lexicon"));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> length(config.min_word_frames,
                                            config.max_word_frames);
  std::vector<RowMatrix> lexicon;
  for (int k = 0; k < config.lexicon_size; ++k) {
    const int L = length(rng);
    RowMatrix walk(L, config.dim);
    for (int j = 0; j < config.dim; ++j) walk(0, j) = normal(rng);
    for (int t = 1; t < L; ++t)
      for (int j = 0; j < config.dim; ++j)
        walk(t, j) = walk(t - 1, j) + config.template_step * normal(rng);
    // 3-frame moving average, shrinking at the edges.
    RowMatrix smooth(L, config.dim);
    for (int t = 0; t < L; ++t) {
      const int lo = std::max(0, t - 1), hi = std::min(L - 1, t + 1);
      smooth.row(t) = walk.middleRows(lo, hi - lo + 1).colwise().mean();
    }
    lexicon.push_back(std::move(smooth));
  }
  return lexicon;
}

RowMatrix time_warp(const RowMatrix& frames, double factor) {
  const int L = static_cast<int>(frames.rows());
  const int out_len = std::max(1, static_cast<int>(std::lround(L * factor)));
  if (out_len == L) return frames;
  RowMatrix out(out_len, frames.cols());
  for (int i = 0; i < out_len; ++i) {
    const double pos =
        out_len == 1 ? 0.0 : static_cast<double>(i) * (L - 1) / (out_len - 1);
    const int lo = static_cast<int>(std::floor(pos));
    const double frac = pos - lo;
    if (frac == 0.0 || lo + 1 >= L)
      out.row(i) = frames.row(std::min(lo, L - 1));
    else
      out.row(i) = (1.0 - frac) * frames.row(lo) + frac * frames.row(lo + 1);
  }
  return out;
}

namespace {

std::vector<SynthUtterance> generate_split(const SynthConfig& config,
                                           const std::vector<RowMatrix>& lexicon,
                                           int count, const std::string& name) {
  Rng rng(derive_seed(config.seed, name));
  std::uniform_int_distribution<int> words(config.min_words, config.max_words);
  std::uniform_int_distribution<int> word_id(1, config.lexicon_size);
  std::uniform_real_distribution<double> warp(config.min_warp, config.max_warp);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SynthUtterance> out;
  for (int u = 0; u < count; ++u) {
    SynthUtterance utt;
    char id[32];
    std::snprintf(id, sizeof(id), "%s%04d", name.c_str(), u);
    utt.features.id = id;
    const int n = words(rng);
    std::vector<RowMatrix> pieces;
    std::vector<int> lengths;
    for (int w = 0; w < n; ++w) {
      const int k = word_id(rng);
      const double factor = config.min_warp == config.max_warp ? config.min_warp : warp(rng);
      RowMatrix piece = time_warp(lexicon[static_cast<std::size_t>(k - 1)], factor);
      if (config.noise > 0.0)
        for (Eigen::Index i = 0; i < piece.size(); ++i)
          piece.data()[i] += config.noise * normal(rng);
      utt.word_ids.push_back(k);
      lengths.push_back(static_cast<int>(piece.rows()));
      pieces.push_back(std::move(piece));
    }
    utt.boundaries = BoundarySet::from_lengths(lengths);
    utt.features.frames.resize(utt.boundaries.num_frames(), config.dim);
    int row = 0;
    for (const auto& p : pieces) {
      utt.features.frames.middleRows(row, p.rows()) = p;
      row += static_cast<int>(p.rows());
    }
    out.push_back(std::move(utt));
  }
  return out;
}

}  // namespace

SynthCorpus generate_corpus(const SynthConfig& config) {
  config.validate();
  SynthCorpus corpus;
  corpus.lexicon = make_lexicon(config);
  corpus.train = generate_split(config, corpus.lexicon, config.train_utterances, "train");
  corpus.test = generate_split(config, corpus.lexicon, config.test_utterances, "test");
  return corpus;
}

std::vector<std::set<int>> relevance_table(std::span<const SynthUtterance> docs,
                                           std::span<const int> query_ids) {
  std::vector<std::set<int>> out;
  for (int q : query_ids) {
    std::set<int> rel;
    for (std::size_t d = 0; d < docs.size(); ++d)
      if (std::find(docs[d].word_ids.begin(), docs[d].word_ids.end(), q) !=
          docs[d].word_ids.end())
        rel.insert(static_cast<int>(d));
    out.push_back(std::move(rel));
  }
  return out;
}

double word_rate(std::span<const SynthUtterance> utterances) {
  double words = 0, frames = 0;
  for (const auto& u : utterances) {
    words += u.boundaries.num_segments();
    frames += u.boundaries.num_frames();
  }
  return frames > 0 ? words / frames : 0.0;
}

}  // namespace segaw
