// src/core/rnn.cc

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

#include "segaw/core/rnn.h"

#include <limits>
#include <sstream>

namespace segaw {
namespace {

// Saturated values are kept inside the open unit interval.
Matrix sigmoid_of(const Matrix& z) {
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return (1.0 + (-z.array()).exp()).inverse().max(kLow).min(kHigh).matrix();
}

Matrix tanh_of(const Matrix& z) { return z.array().tanh().matrix(); }

void check_input(const Matrix& x, int input_dim, Eigen::Index max_cols,
                 const char* who) {
  if (x.rows() != input_dim) {
    std::ostringstream os;
    os << who << ": input has " << x.rows() << " rows, cell expects "
       << input_dim;
    throw ShapeError(os.str());
  }
  if (x.cols() > max_cols || x.cols() == 0) {
    std::ostringstream os;
    os << who << ": batch of " << x.cols() << " columns, at most " << max_cols
       << " active";
    throw ShapeError(os.str());
  }
}

// Grows a recurrent gradient from n to n_prev columns (zero padded).
Matrix widen(const Matrix& m, Eigen::Index cols) {
  if (m.cols() == cols) return m;
  Matrix out = Matrix::Zero(m.rows(), cols);
  out.leftCols(m.cols()) = m;
  return out;
}

}  // namespace

LstmCellParams::LstmCellParams(int input_dim, int hidden_dim)
    : wx(Matrix::Zero(4 * hidden_dim, input_dim)),
      wh(Matrix::Zero(4 * hidden_dim, hidden_dim)),
      b(Matrix::Zero(4 * hidden_dim, 1)) {}

void LstmCellParams::initialize(Rng& rng) {
  fill_uniform(wx, 0.08, rng);
  fill_uniform(wh, 0.08, rng);
  b.setZero();
  const int h = hidden_dim();
  b.middleRows(h, h).setOnes();
}

GruCellParams::GruCellParams(int input_dim, int hidden_dim)
    : wx(Matrix::Zero(3 * hidden_dim, input_dim)),
      wh(Matrix::Zero(3 * hidden_dim, hidden_dim)),
      b(Matrix::Zero(3 * hidden_dim, 1)) {}

void GruCellParams::initialize(Rng& rng) {
  fill_uniform(wx, 0.08, rng);
  fill_uniform(wh, 0.08, rng);
  b.setZero();
}

LstmStepResult lstm_step(const LstmCellParams& params, const LstmState& state,
                         const Vector& input) {
  const int h = params.hidden_dim();
  if (state.h.size() != h || state.c.size() != h)
    throw ShapeError("lstm_step: state size does not match hidden_dim");
  check_input(input, params.input_dim(), 1, "lstm_step");

  const Matrix z = params.wx * input + params.wh * state.h + params.b;
  const Matrix i = sigmoid_of(z.topRows(h));
  const Matrix f = sigmoid_of(z.middleRows(h, h));
  const Matrix g = tanh_of(z.middleRows(2 * h, h));
  const Matrix o = sigmoid_of(z.bottomRows(h));
  LstmStepResult out;
  out.state.c = (f.array() * state.c.array() + i.array() * g.array()).matrix();
  out.state.h = (o.array() * out.state.c.array().tanh()).matrix();
  out.output = out.state.h;
  return out;
}

GruStepResult gru_step(const GruCellParams& params, const Vector& state,
                       const Vector& input) {
  if (state.size() != params.hidden_dim())
    throw ShapeError("gru_step: state size does not match hidden_dim");
  GruTape tape(params, 1, Matrix(state));
  tape.step(input);
  GruStepResult out;
  out.state = tape.output(0);
  out.output = out.state;
  out.update_gate = tape.update_gate(0);
  return out;
}

// ---------------------------------------------------------------------------

LstmTape::LstmTape(std::span<const LstmCellParams> layers, int batch,
                   std::vector<Matrix> initial_h)
    : layers_(layers), batch_(batch) {
  if (batch <= 0) throw ShapeError("LstmTape: batch must be positive");
  for (std::size_t l = 1; l < layers_.size(); ++l) {
    if (layers_[l].input_dim() != layers_[l - 1].hidden_dim())
      throw ShapeError("LstmTape: layer input does not match layer below");
  }
  if (!initial_h.empty() && initial_h.size() != layers_.size())
    throw ShapeError("LstmTape: one initial state per layer required");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const int hd = layers_[l].hidden_dim();
    if (initial_h.empty()) {
      h_.push_back(Matrix::Zero(hd, batch));
    } else {
      require_shape(initial_h[l], hd, batch, "LstmTape initial state");
      h_.push_back(std::move(initial_h[l]));
    }
    c_.push_back(Matrix::Zero(hd, batch));
  }
}

int LstmTape::output_dim() const {
  return layers_.empty() ? -1 : layers_.back().hidden_dim();
}

const Matrix& LstmTape::step(const Matrix& x) {
  const Eigen::Index max_cols =
      cache_.empty() ? batch_ : cache_.back().empty() ? batch_
                                                      : cache_.back()[0].x.cols();
  std::vector<Cache> step_cache(layers_.size());
  if (layers_.empty()) {
    if (x.cols() > max_cols || x.cols() == 0)
      throw ShapeError("LstmTape: active columns may not grow");
    Cache c;
    c.x = x;
    c.h = x;
    step_cache.push_back(std::move(c));
    cache_.push_back(std::move(step_cache));
    ++next_backward_;
    return cache_.back().back().h;
  }
  const Eigen::Index n = x.cols();
  const Matrix* input = &x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LstmCellParams& p = layers_[l];
    const int hd = p.hidden_dim();
    check_input(*input, p.input_dim(), max_cols, "LstmTape");
    Cache& c = step_cache[l];
    c.x = *input;
    c.h_prev = h_[l].leftCols(n);
    c.c_prev = c_[l].leftCols(n);
    Matrix z = p.wx * c.x + p.wh * c.h_prev;
    z.colwise() += p.b.col(0);
    c.i = sigmoid_of(z.topRows(hd));
    c.f = sigmoid_of(z.middleRows(hd, hd));
    c.g = tanh_of(z.middleRows(2 * hd, hd));
    c.o = sigmoid_of(z.bottomRows(hd));
    c.c = (c.f.array() * c.c_prev.array() + c.i.array() * c.g.array()).matrix();
    c.tanh_c = tanh_of(c.c);
    c.h = (c.o.array() * c.tanh_c.array()).matrix();
    h_[l].leftCols(n) = c.h;
    c_[l].leftCols(n) = c.c;
    input = &c.h;
  }
  cache_.push_back(std::move(step_cache));
  ++next_backward_;
  return cache_.back().back().h;
}

Matrix LstmTape::backward_step(const Matrix& dh_top,
                               std::span<LstmCellParams> grads) {
  if (next_backward_ == 0)
    throw ShapeError("LstmTape: no forward step left to reverse");
  const int k = --next_backward_;
  if (layers_.empty()) return dh_top;
  if (grads.size() != layers_.size())
    throw ShapeError("LstmTape: gradient layout does not match layers");
  std::vector<Cache>& step_cache = cache_[k];
  const Eigen::Index n = step_cache[0].x.cols();
  const Eigen::Index n_prev =
      k == 0 ? batch_ : cache_[k - 1][0].x.cols();
  if (dh_.empty()) {
    for (const auto& p : layers_) {
      dh_.push_back(Matrix::Zero(p.hidden_dim(), n));
      dc_.push_back(Matrix::Zero(p.hidden_dim(), n));
    }
  }
  require_shape(dh_top, layers_.back().hidden_dim(), n, "LstmTape dh_top");

  Matrix d_from_above = dh_top;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    const LstmCellParams& p = layers_[l];
    const int hd = p.hidden_dim();
    const Cache& c = step_cache[l];
    const Matrix dh = d_from_above + dh_[l].leftCols(n);
    const Matrix dc =
        (dc_[l].leftCols(n).array() +
         dh.array() * c.o.array() * (1.0 - c.tanh_c.array().square()))
            .matrix();
    Matrix dz(4 * hd, n);
    dz.topRows(hd) =
        (dc.array() * c.g.array() * c.i.array() * (1.0 - c.i.array())).matrix();
    dz.middleRows(hd, hd) = (dc.array() * c.c_prev.array() * c.f.array() *
                             (1.0 - c.f.array()))
                                .matrix();
    dz.middleRows(2 * hd, hd) =
        (dc.array() * c.i.array() * (1.0 - c.g.array().square())).matrix();
    dz.bottomRows(hd) = (dh.array() * c.tanh_c.array() * c.o.array() *
                         (1.0 - c.o.array()))
                            .matrix();
    LstmCellParams& g = grads[l];
    g.wx.noalias() += dz * c.x.transpose();
    g.wh.noalias() += dz * c.h_prev.transpose();
    g.b.col(0) += dz.rowwise().sum();
    dh_[l] = widen(p.wh.transpose() * dz, n_prev);
    dc_[l] = widen((dc.array() * c.f.array()).matrix(), n_prev);
    d_from_above = p.wx.transpose() * dz;
  }
  step_cache.clear();
  step_cache.shrink_to_fit();
  return d_from_above;
}

// ---------------------------------------------------------------------------

GruTape::GruTape(const GruCellParams& params, int batch, Matrix initial_h)
    : params_(params), batch_(batch) {
  if (batch <= 0) throw ShapeError("GruTape: batch must be positive");
  if (initial_h.size() == 0) {
    h_ = Matrix::Zero(params.hidden_dim(), batch);
  } else {
    require_shape(initial_h, params.hidden_dim(), batch,
                  "GruTape initial state");
    h_ = std::move(initial_h);
  }
}

const Matrix& GruTape::step(const Matrix& x) {
  const Eigen::Index max_cols = cache_.empty() ? batch_ : cache_.back().x.cols();
  check_input(x, params_.input_dim(), max_cols, "GruTape");
  const int hd = params_.hidden_dim();
  const Eigen::Index n = x.cols();
  Cache c;
  c.x = x;
  c.h_prev = h_.leftCols(n);
  Matrix zx = params_.wx * x;
  zx.colwise() += params_.b.col(0);
  const Matrix zh = params_.wh.topRows(2 * hd) * c.h_prev;
  c.z = sigmoid_of(zx.topRows(hd) + zh.topRows(hd));
  c.r = sigmoid_of(zx.middleRows(hd, hd) + zh.bottomRows(hd));
  const Matrix rh = (c.r.array() * c.h_prev.array()).matrix();
  c.n = tanh_of(zx.bottomRows(hd) + params_.wh.bottomRows(hd) * rh);
  c.h = ((1.0 - c.z.array()) * c.n.array() + c.z.array() * c.h_prev.array())
            .matrix();
  h_.leftCols(n) = c.h;
  cache_.push_back(std::move(c));
  ++next_backward_;
  return cache_.back().h;
}

Matrix GruTape::backward_step(const Matrix& dh_in, GruCellParams& grads) {
  if (next_backward_ == 0)
    throw ShapeError("GruTape: no forward step left to reverse");
  const int k = --next_backward_;
  const Cache& c = cache_[k];
  const int hd = params_.hidden_dim();
  const Eigen::Index n = c.x.cols();
  const Eigen::Index n_prev = k == 0 ? batch_ : cache_[k - 1].x.cols();
  if (dh_.size() == 0) dh_ = Matrix::Zero(hd, n);
  require_shape(dh_in, hd, n, "GruTape dh");

  const Matrix dh = dh_in + dh_.leftCols(n);
  const auto z = c.z.array();
  const auto r = c.r.array();
  const auto nn = c.n.array();
  const auto hp = c.h_prev.array();
  const Matrix dz_pre =
      (dh.array() * (hp - nn) * z * (1.0 - z)).matrix();
  const Matrix dn_pre =
      (dh.array() * (1.0 - z) * (1.0 - nn.square())).matrix();
  const Matrix rh = (r * hp).matrix();
  const Matrix d_rh = params_.wh.bottomRows(hd).transpose() * dn_pre;
  const Matrix dr_pre = (d_rh.array() * hp * r * (1.0 - r)).matrix();

  Matrix dzx(3 * hd, n);
  dzx.topRows(hd) = dz_pre;
  dzx.middleRows(hd, hd) = dr_pre;
  dzx.bottomRows(hd) = dn_pre;
  grads.wx.noalias() += dzx * c.x.transpose();
  grads.b.col(0) += dzx.rowwise().sum();
  grads.wh.topRows(hd).noalias() += dz_pre * c.h_prev.transpose();
  grads.wh.middleRows(hd, hd).noalias() += dr_pre * c.h_prev.transpose();
  grads.wh.bottomRows(hd).noalias() += dn_pre * rh.transpose();

  Matrix dh_prev = (dh.array() * z).matrix() + (d_rh.array() * r).matrix() +
                   params_.wh.topRows(hd).transpose() * dz_pre +
                   params_.wh.middleRows(hd, hd).transpose() * dr_pre;
  dh_ = widen(dh_prev, n_prev);
  return params_.wx.transpose() * dzx;
}

}  // namespace segaw
