// include/segaw/model/ssae.h

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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "segaw/core/rnn.h"
#include "segaw/core/types.h"

namespace segaw {

enum class Action : std::uint8_t { kSegment = 0, kPass = 1 };
using ActionSequence = std::vector<Action>;

enum class DecodeMode { kGreedy, kSample };

// Per-frame (segment, pass) probabilities, T x 2.
struct PolicyOutput {
  Matrix probs;
  int num_frames() const { return static_cast<int>(probs.rows()); }
};

// One embedding per segment, N x d_e, aligned with a BoundarySet.
struct EmbeddingSequence {
  RowMatrix vectors;
  int size() const { return static_cast<int>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }
};

struct SsaeDims {
  int feature_dim = 39;
  int gas_dim = 100;
  int encoder_hidden = 100;
  int decoder_hidden = 100;
  int gate_hidden = 256;
  int gate_layers = 2;

  int gate_input_dim() const { return feature_dim + gas_dim + 1; }
  bool operator==(const SsaeDims&) const = default;
};

struct EncoderParams {
  LstmCellParams cell;

  template <class Self, class F>
  static void visit(Self& p, const std::string& prefix, F&& f) {
    visit_params(p.cell, prefix + "cell.", f);
  }
};

// Decoder state is initialized as h0 = w_init e + b_init, c0 = 0; each step
// emits x̂ = w_out h + b_out.
struct DecoderParams {
  LstmCellParams cell;
  Matrix w_init;  // Hd x He
  Matrix b_init;  // Hd x 1
  Matrix w_out;   // d x Hd
  Matrix b_out;   // d x 1

  template <class Self, class F>
  static void visit(Self& p, const std::string& prefix, F&& f) {
    visit_params(p.cell, prefix + "cell.", f);
    f(prefix + "w_init", p.w_init);
    f(prefix + "b_init", p.b_init);
    f(prefix + "w_out", p.w_out);
    f(prefix + "b_out", p.b_out);
  }
};

struct AutoencoderParams {
  EncoderParams encoder;
  DecoderParams decoder;

  static AutoencoderParams zeros(const SsaeDims& dims);
  static AutoencoderParams initialized(const SsaeDims& dims, Rng& rng);

  template <class Self, class F>
  static void visit(Self& p, const std::string& prefix, F&& f) {
    visit_params(p.encoder, prefix + "encoder.", f);
    visit_params(p.decoder, prefix + "decoder.", f);
  }
};

// Segmentation gate: stacked LSTM over s_t = [x_t ; g_t ; a_{t-1}] followed by
// a (segment, pass) softmax head.
struct GateParams {
  std::vector<LstmCellParams> layers;
  Matrix w_pi;  // 2 x Hg
  Matrix b_pi;  // 2 x 1

  static GateParams zeros(const SsaeDims& dims);
  static GateParams initialized(const SsaeDims& dims, Rng& rng);
  int input_dim() const;

  template <class Self, class F>
  static void visit(Self& p, const std::string& prefix, F&& f) {
    for (std::size_t l = 0; l < p.layers.size(); ++l)
      visit_params(p.layers[l], prefix + "l" + std::to_string(l) + ".", f);
    f(prefix + "w_pi", p.w_pi);
    f(prefix + "b_pi", p.b_pi);
  }
};

struct SsaeParams {
  SsaeDims dims;
  AutoencoderParams autoencoder;
  GateParams gate;

  static SsaeParams zeros(const SsaeDims& dims);
  static SsaeParams initialized(const SsaeDims& dims, Rng& rng);

  template <class Self, class F>
  static void visit(Self& p, const std::string& prefix, F&& f) {
    visit_params(p.autoencoder, prefix, f);
    visit_params(p.gate, prefix + "gate.", f);
  }
};

// ---------------------------------------------------------------------------
// Segmentation gate

// Policy for every frame given the action history.  actions must hold at
// least T-1 entries; a_t only influences frames after t.  The action before
// frame 1 is "segment".
PolicyOutput gate_forward(const SsaeParams& params, const FeatureMatrix& f,
                          const RowMatrix& gas, const ActionSequence& actions);

// Row-wise decision over a fixed policy.  Greedy picks "segment" only when its
// probability is strictly higher.
ActionSequence decide_actions(const PolicyOutput& policy, DecodeMode mode,
                              Rng* rng = nullptr);

struct Rollout {
  ActionSequence actions;
  PolicyOutput policy;
};

// Runs the gate and decides each a_t before computing frame t+1.
Rollout rollout(const SsaeParams& params, const FeatureMatrix& f,
                const RowMatrix& gas, DecodeMode mode, Rng* rng = nullptr);

BoundarySet actions_to_boundaries(const ActionSequence& actions);
ActionSequence boundaries_to_actions(const BoundarySet& boundaries);

// One utterance as seen by the gate.
struct GateEpisode {
  const RowMatrix* frames = nullptr;
  const RowMatrix* gas = nullptr;
  int num_frames() const { return static_cast<int>(frames->rows()); }
};

// Batched gate run over several episodes (episodes may repeat, e.g. M samples
// of one utterance).  Keeps the tape for backpropagation of policy losses.
class GateBatch {
 public:
  GateBatch(const GateParams& params, std::span<const GateEpisode> episodes);

  // Teacher-forced run with known actions (one sequence per episode).
  void run_given(const std::vector<ActionSequence>& actions);
  // Decide actions on the fly.
  void run_decide(DecodeMode mode, Rng* rng);

  const std::vector<ActionSequence>& actions() const { return actions_; }
  // T_e x 2 probabilities of episode e.
  const std::vector<Matrix>& probs() const { return probs_; }
  // log π_t(a_t) per frame of episode e.
  Vector log_probs(int episode) const;

  // d_logits[e] is T_e x 2: the loss gradient w.r.t. the pre-softmax logits.
  // Accumulates into grads.  Callable once.
  void backward(const std::vector<Matrix>& d_logits, GateParams& grads);

 private:
  void run(const std::vector<ActionSequence>* given, DecodeMode mode, Rng* rng);

  const GateParams& params_;
  std::vector<GateEpisode> episodes_;
  std::vector<int> order_;  // column -> episode, by non-increasing length
  std::vector<int> active_;  // active column count per step
  std::unique_ptr<LstmTape> tape_;
  std::vector<Matrix> top_h_;  // per step, Hg x n_t
  std::vector<ActionSequence> actions_;
  std::vector<Matrix> probs_;
};

// ---------------------------------------------------------------------------
// Encoder / decoder

struct SegmentView {
  const RowMatrix* frames = nullptr;
  Segment segment;
};

// Encoder with a reset at every segment start; the embedding of a segment is
// the encoder output at its last frame.
class EncoderBatch {
 public:
  EncoderBatch(const EncoderParams& params, std::span<const SegmentView> segments);
  // He x S, column s belongs to segments[s].
  const Matrix& embeddings() const { return embeddings_; }
  void backward(const Matrix& d_embeddings, EncoderParams& grads);

 private:
  const EncoderParams& params_;
  std::vector<SegmentView> segments_;
  std::vector<int> order_;
  std::vector<int> active_;
  std::unique_ptr<LstmTape> tape_;
  Matrix embeddings_;
};

struct DecoderOptions {
  // Feed the true following frame instead of the previous reconstruction.
  bool teacher_forcing = false;
};

// Backward-order decoder, reset per segment: frames end-1, end-2, ..., begin
// are produced in that order; the first step consumes a zero frame.
class DecoderBatch {
 public:
  DecoderBatch(const DecoderParams& params, const Matrix& embeddings,
               std::span<const SegmentView> segments,
               const DecoderOptions& options = {});

  // Σ_t (1/d)‖x̂_t − x_t‖² over all segments.
  double loss() const;
  const std::vector<double>& segment_losses() const { return segment_losses_; }
  // Reconstruction of segments[s] in forward frame order, length x d.
  RowMatrix reconstruction(int s) const;
  // Returns dL/d embeddings (He x S) where L = Σ_s w_s L_s; empty weights
  // mean w_s = 1.
  Matrix backward(DecoderParams& grads, std::span<const double> weights = {});

 private:
  const DecoderParams& params_;
  Matrix embeddings_sorted_;
  std::vector<SegmentView> segments_;
  DecoderOptions options_;
  std::vector<int> order_;
  std::vector<int> active_;
  std::unique_ptr<LstmTape> tape_;
  std::vector<Matrix> outputs_;  // x̂ per step, d x n_k
  std::vector<Matrix> targets_;  // x per step, d x n_k
  std::vector<Matrix> hidden_;   // h per step, Hd x n_k
  std::vector<double> segment_losses_;
};

// Reconstruction loss and (optionally) gradients of a set of segments through
// encoder and decoder.  Returns per-segment losses in input order.
struct AutoencoderResult {
  double loss = 0.0;
  std::vector<double> segment_losses;
};
AutoencoderResult autoencoder_loss(const AutoencoderParams& params,
                                   std::span<const SegmentView> segments,
                                   const DecoderOptions& options,
                                   AutoencoderParams* grads);

EmbeddingSequence encode_segments(const SsaeParams& params,
                                  const FeatureMatrix& f,
                                  const BoundarySet& boundaries);
EmbeddingSequence encode_segments(const AutoencoderParams& params,
                                  const FeatureMatrix& f,
                                  const BoundarySet& boundaries);

// Free-running reconstruction of every segment from its embedding.
RowMatrix decode_segments(const SsaeParams& params, const EmbeddingSequence& y,
                          const BoundarySet& boundaries);
RowMatrix decode_segments(const AutoencoderParams& params,
                          const EmbeddingSequence& y,
                          const BoundarySet& boundaries);

// Σ_t (1/d)‖x̂_t − x_t‖².
double reconstruction_loss(const RowMatrix& original,
                           const RowMatrix& reconstructed);

}  // namespace segaw
