// include/segaw/core/rnn.h

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

#include <span>
#include <string>
#include <vector>

#include "segaw/core/matrix.h"

namespace segaw {

// LSTM cell without peepholes. Gate rows are stacked [input, forget, cell, output]:
//   i = σ(Wx_i x + Wh_i h + b_i)     f = σ(Wx_f x + Wh_f h + b_f)
//   g = tanh(Wx_g x + Wh_g h + b_g)  o = σ(Wx_o x + Wh_o h + b_o)
//   c' = f ⊙ c + i ⊙ g               h' = o ⊙ tanh(c')
struct LstmCellParams {
  Matrix wx;  // 4H x I
  Matrix wh;  // 4H x H
  Matrix b;   // 4H x 1

  LstmCellParams() = default;
  LstmCellParams(int input_dim, int hidden_dim);

  int input_dim() const { return static_cast<int>(wx.cols()); }
  int hidden_dim() const { return static_cast<int>(wh.cols()); }

  // Uniform [-0.08, 0.08] weights, forget-gate bias 1, other biases 0.
  void initialize(Rng& rng);

  template <class Self, class F>
  static void visit(Self& p, const std::string& prefix, F&& f) {
    f(prefix + "wx", p.wx);
    f(prefix + "wh", p.wh);
    f(prefix + "b", p.b);
  }
};

// GRU cell, rows stacked [update z, reset r, candidate n]:
//   z = σ(Wx_z x + Wh_z h + b_z)   r = σ(Wx_r x + Wh_r h + b_r)
//   n = tanh(Wx_n x + Wh_n (r ⊙ h) + b_n)
//   h' = (1 - z) ⊙ n + z ⊙ h
struct GruCellParams {
  Matrix wx;  // 3H x I
  Matrix wh;  // 3H x H
  Matrix b;   // 3H x 1

  GruCellParams() = default;
  GruCellParams(int input_dim, int hidden_dim);

  int input_dim() const { return static_cast<int>(wx.cols()); }
  int hidden_dim() const { return static_cast<int>(wh.cols()); }

  void initialize(Rng& rng);

  template <class Self, class F>
  static void visit(Self& p, const std::string& prefix, F&& f) {
    f(prefix + "wx", p.wx);
    f(prefix + "wh", p.wh);
    f(prefix + "b", p.b);
  }
};

struct LstmState {
  Vector h;
  Vector c;
};

struct LstmStepResult {
  LstmState state;
  Vector output;
};

LstmStepResult lstm_step(const LstmCellParams& params, const LstmState& state,
                         const Vector& input);

struct GruStepResult {
  Vector state;
  Vector output;
  Vector update_gate;
};

GruStepResult gru_step(const GruCellParams& params, const Vector& state,
                       const Vector& input);

// Runs a stack of LSTM layers over a batch, one step at a time, and keeps
// what backpropagation needs.  Columns are sequences.  Sequences must be
// ordered by non-increasing length so that the active set at every step is a
// prefix of the columns: the column count passed to step() never grows.
// With zero layers the stack is the identity map.
class LstmTape {
 public:
  // initial_h: one H x batch matrix per layer, or empty for zero states.
  LstmTape(std::span<const LstmCellParams> layers, int batch,
           std::vector<Matrix> initial_h = {});

  // x: I x n, n <= previous n. Returns the top-layer output, H x n.
  const Matrix& step(const Matrix& x);

  int steps() const { return static_cast<int>(cache_.size()); }
  int pending_backward_steps() const { return next_backward_; }
  int output_dim() const;

  // Backpropagates the most recent step not yet reversed. dh_top is the loss
  // gradient injected at that step's top output (H x n_k).  Gradients are
  // accumulated into grads (same layout as the layers).  Returns the gradient
  // w.r.t. that step's input x (I x n_k).
  Matrix backward_step(const Matrix& dh_top, std::span<LstmCellParams> grads);

  // Gradient w.r.t. initial_h, valid once every step has been reversed.
  const std::vector<Matrix>& initial_h_grads() const { return dh_; }

 private:
  struct Cache {
    Matrix x, h_prev, c_prev, i, f, g, o, c, tanh_c, h;
  };
  std::span<const LstmCellParams> layers_;
  int batch_;
  std::vector<Matrix> h_, c_;            // running state per layer
  std::vector<std::vector<Cache>> cache_;  // [step][layer]
  std::vector<Matrix> dh_, dc_;          // running recurrent grads per layer
  int next_backward_ = 0;
};

// Single-layer GRU tape, same batching contract as LstmTape.  The update-gate
// activations of every step are retained.
class GruTape {
 public:
  GruTape(const GruCellParams& params, int batch, Matrix initial_h = Matrix());

  const Matrix& step(const Matrix& x);
  int steps() const { return static_cast<int>(cache_.size()); }
  const Matrix& update_gate(int step) const { return cache_[step].z; }
  const Matrix& output(int step) const { return cache_[step].h; }

  Matrix backward_step(const Matrix& dh, GruCellParams& grads);
  const Matrix& initial_h_grad() const { return dh_; }

 private:
  struct Cache {
    Matrix x, h_prev, z, r, n, h;
  };
  const GruCellParams& params_;
  int batch_;
  Matrix h_;
  std::vector<Cache> cache_;
  Matrix dh_;
  int next_backward_ = 0;
};

}  // namespace segaw
