// src/gas/gas.cc

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

#include "segaw/gas/gas.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "segaw/core/optim.h"

namespace segaw {

GasModel::GasModel(int feature_dim, int hidden_dim)
    : encoder(feature_dim, hidden_dim),
      decoder(feature_dim, hidden_dim),
      w_out(Matrix::Zero(feature_dim, hidden_dim)),
      b_out(Matrix::Zero(feature_dim, 1)) {
  if (feature_dim <= 0 || hidden_dim <= 0)
    throw ShapeError("GasModel: dimensions must be positive");
}

void GasModel::initialize(Rng& rng) {
  encoder.initialize(rng);
  decoder.initialize(rng);
  fill_uniform(w_out, 0.08, rng);
  b_out.setZero();
}

double gas_reconstruction_loss(const GasModel& model,
                               std::span<const RowMatrix* const> sequences,
                               GasModel* grads) {
  const int B = static_cast<int>(sequences.size());
  if (B == 0) return 0.0;
  const int d = model.feature_dim();
  const int H = model.hidden_dim();
  std::vector<int> order(B);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return sequences[a]->rows() > sequences[b]->rows();
  });
  std::vector<int> len(B);
  for (int j = 0; j < B; ++j) {
    const RowMatrix& s = *sequences[order[j]];
    if (s.rows() == 0) throw InputError("GAS autoencoder: empty sequence");
    if (s.cols() != d)
      throw ShapeError("GAS autoencoder: feature dim " + std::to_string(s.cols()) +
                       " != " + std::to_string(d));
    len[j] = static_cast<int>(s.rows());
  }
  const int K = len[0];
  auto active = [&](int k) {
    int n = 0;
    while (n < B && len[n] > k) ++n;
    return n;
  };

  GruTape enc(model.encoder, B);
  Matrix h_final(H, B);
  for (int k = 0; k < K; ++k) {
    const int n = active(k);
    Matrix x(d, n);
    for (int j = 0; j < n; ++j) x.col(j) = sequences[order[j]]->row(k).transpose();
    const Matrix& h = enc.step(x);
    for (int j = 0; j < n; ++j)
      if (len[j] == k + 1) h_final.col(j) = h.col(j);
  }

  GruTape dec(model.decoder, B, h_final);
  std::vector<Matrix> outputs, targets;
  double loss = 0.0;
  for (int k = 0; k < K; ++k) {
    const int n = active(k);
    const Matrix x = k == 0 ? Matrix::Zero(d, n) : Matrix(outputs.back().leftCols(n));
    const Matrix& h = dec.step(x);
    Matrix y = model.w_out * h;
    y.colwise() += model.b_out.col(0);
    Matrix target(d, n);
    for (int j = 0; j < n; ++j)
      target.col(j) = sequences[order[j]]->row(len[j] - 1 - k).transpose();
    loss += (y - target).squaredNorm() / d;
    outputs.push_back(std::move(y));
    targets.push_back(std::move(target));
  }
  if (!std::isfinite(loss)) throw TrainingError("GAS autoencoder: non-finite loss");
  if (grads == nullptr) return loss;

  Matrix carry;  // gradient arriving at output k through the input of step k+1
  for (int k = K - 1; k >= 0; --k) {
    Matrix dy = (2.0 / d) * (outputs[k] - targets[k]);
    if (carry.size() > 0) dy.leftCols(carry.cols()) += carry;
    grads->w_out.noalias() += dy * dec.output(k).transpose();
    grads->b_out.col(0) += dy.rowwise().sum();
    const Matrix dh = model.w_out.transpose() * dy;
    carry = dec.backward_step(dh, grads->decoder);
  }
  const Matrix& dh_final = dec.initial_h_grad();
  for (int k = K - 1; k >= 0; --k) {
    const int n = active(k);
    Matrix dh = Matrix::Zero(H, n);
    for (int j = 0; j < n; ++j)
      if (len[j] == k + 1) dh.col(j) = dh_final.col(j);
    enc.backward_step(dh, grads->encoder);
  }
  return loss;
}

double gas_mse(const GasModel& model, std::span<const FeatureMatrix> corpus) {
  double loss = 0.0, frames = 0.0;
  for (const auto& f : corpus) {
    const RowMatrix* p = &f.frames;
    loss += gas_reconstruction_loss(model, std::span<const RowMatrix* const>(&p, 1));
    frames += f.num_frames();
  }
  return frames > 0 ? loss / frames : 0.0;
}

GasTrainResult train_gas_autoencoder(std::span<const FeatureMatrix> corpus,
                                     const GasConfig& config) {
  if (corpus.empty()) throw InputError("train_gas_autoencoder: empty corpus");
  if (config.hidden_dim <= 0 || config.batch_size <= 0 || config.epochs < 0)
    throw ConfigError("train_gas_autoencoder: invalid configuration");
  const int d = corpus.front().dim();
  std::vector<RowMatrix> pieces;
  for (const auto& f : corpus) {
    if (f.dim() != d) throw ShapeError("train_gas_autoencoder: mixed feature dims");
    if (f.num_frames() == 0) throw InputError("train_gas_autoencoder: empty utterance " + f.id);
    const int T = f.num_frames();
    const int step = config.chunk_length > 0 ? config.chunk_length : T;
    for (int s = 0; s < T; s += step)
      pieces.emplace_back(f.frames.middleRows(s, std::min(step, T - s)));
  }

  GasTrainResult result;
  Rng rng(derive_seed(config.seed, "gas"));
  result.model = GasModel(d, config.hidden_dim);
  result.model.initialize(rng);
  GasModel grads = zeros_like(result.model);
  const ParamList params = param_list(result.model);
  const ParamList grad_list = param_list(grads);
  AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  AdamState state(params, adam);

  std::vector<int> order(pieces.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0, epoch_frames = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<const RowMatrix*> batch;
      double frames = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&pieces[order[i]]);
        frames += static_cast<double>(pieces[order[i]].rows());
      }
      for (auto& g : grad_list) g.value->setZero();
      const double loss = gas_reconstruction_loss(result.model, batch, &grads);
      for (auto& g : grad_list) *g.value /= frames;
      clip_global_norm(grad_list, config.clip_norm);
      adam_update(params, grad_list, state);
      epoch_loss += loss;
      epoch_frames += frames;
    }
    result.loss_curve.push_back(epoch_loss / epoch_frames);
  }
  result.model.trained = true;
  return result;
}

GasSequence extract_gas(const GasModel& model, const FeatureMatrix& f) {
  if (!model.trained) throw InputError("extract_gas: model has not been trained");
  if (f.dim() != model.feature_dim())
    throw ShapeError("extract_gas: feature dim " + std::to_string(f.dim()) +
                     " != model dim " + std::to_string(model.feature_dim()));
  GruTape tape(model.encoder, 1);
  GasSequence g(f.num_frames(), model.hidden_dim());
  for (int t = 0; t < f.num_frames(); ++t) {
    tape.step(f.frames.row(t).transpose());
    g.row(t) = tape.update_gate(t).col(0).transpose();
  }
  return g;
}

Vector gas_difference(const GasSequence& g) {
  const Eigen::Index T = g.rows();
  Vector D = Vector::Zero(T);
  if (T == 0) return D;
  const Vector m = g.rowwise().mean();
  for (Eigen::Index t = 1; t < T; ++t) D(t) = std::abs(m(t) - m(t - 1));
  return D;
}

BoundarySet gas_segment(const GasSequence& g, const GasSegmentOptions& options) {
  const int T = static_cast<int>(g.rows());
  if (T == 0) throw InputError("gas_segment: empty sequence");
  if (T == 1) return BoundarySet::whole(1);
  const Vector D = gas_difference(g);
  double threshold = options.threshold;
  if (std::isnan(threshold)) {
    const auto tail = D.tail(T - 1).array();
    const double mean = tail.mean();
    const double var = (tail - mean).square().mean();
    threshold = mean + std::sqrt(var);
  }
  std::vector<int> peaks;
  for (int t = 1; t < T; ++t) {
    if (!(D(t) > threshold)) continue;
    if (D(t) < D(t - 1)) continue;
    if (t + 1 < T && D(t) < D(t + 1)) continue;
    peaks.push_back(t);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](int a, int b) { return D(a) > D(b); });
  std::vector<int> kept;
  for (int p : peaks) {
    bool ok = true;
    for (int q : kept)
      if (std::abs(p - q) < options.min_gap) ok = false;
    if (ok) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  return BoundarySet::from_interior(kept, T);
}

}  // namespace segaw
