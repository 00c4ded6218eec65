// include/segaw/gas/gas.h

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
#include <limits>
#include <span>
#include <vector>

#include "segaw/core/rnn.h"
#include "segaw/core/types.h"

namespace segaw {

// GRU sequence autoencoder whose encoder update gates supply the per-frame
// gate activation signal.  The decoder starts from the final encoder state
// and regenerates the input in reverse order, feeding back its own output.
struct GasModel {
  GruCellParams encoder;
  GruCellParams decoder;
  Matrix w_out;  // d x H
  Matrix b_out;  // d x 1
  bool trained = false;

  GasModel() = default;
  GasModel(int feature_dim, int hidden_dim);

  int feature_dim() const { return encoder.input_dim(); }
  int hidden_dim() const { return encoder.hidden_dim(); }

  void initialize(Rng& rng);

  template <class Self, class F>
  static void visit(Self& p, const std::string& prefix, F&& f) {
    GruCellParams::visit(p.encoder, prefix + "encoder.", f);
    GruCellParams::visit(p.decoder, prefix + "decoder.", f);
    f(prefix + "out.w", p.w_out);
    f(prefix + "out.b", p.b_out);
  }
};

// T x H update-gate activations, values in (0, 1).
using GasSequence = RowMatrix;

struct GasConfig {
  int hidden_dim = 100;
  int epochs = 20;
  int batch_size = 16;
  double learning_rate = 1e-3;
  double clip_norm = 5.0;
  // Train on non-overlapping chunks of this many frames; 0 trains on whole
  // utterances.  Extraction always runs over the whole utterance.
  int chunk_length = 0;
  std::uint64_t seed = 0;
};

struct GasTrainResult {
  GasModel model;
  std::vector<double> loss_curve;  // mean per-frame loss per epoch
};

// Sum over sequences and frames of (1/d)|x̂ - x|^2.  With grads, accumulates
// the gradient of that sum.
double gas_reconstruction_loss(const GasModel& model,
                               std::span<const RowMatrix* const> sequences,
                               GasModel* grads = nullptr);

// Mean per-frame reconstruction loss.
double gas_mse(const GasModel& model, std::span<const FeatureMatrix> corpus);

GasTrainResult train_gas_autoencoder(std::span<const FeatureMatrix> corpus,
                                     const GasConfig& config);

GasSequence extract_gas(const GasModel& model, const FeatureMatrix& f);

struct GasSegmentOptions {
  // Peak threshold on the difference signal; NaN selects mean + 1 std.
  double threshold = std::numeric_limits<double>::quiet_NaN();
  int min_gap = 4;
};

// Difference signal D: D[0] = 0, D[t] = |m_t - m_{t-1}| with m_t the mean
// activation of row t.
Vector gas_difference(const GasSequence& g);

// Boundaries at local maxima of the difference signal above the threshold,
// larger peaks first, each at least min_gap frames from every kept one.  A
// peak at row t (0-based) ends a segment at frame t (1-based), so a step
// that first appears in row k ends the previous segment at frame k.
BoundarySet gas_segment(const GasSequence& g, const GasSegmentOptions& options = {});

}  // namespace segaw
