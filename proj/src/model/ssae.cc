// src/model/ssae.cc

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

#include "segaw/model/ssae.h"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace segaw {
namespace {

// Columns ordered by non-increasing length (stable), plus the number of
// sequences still active at each step.
void length_order(const std::vector<int>& lengths, std::vector<int>& order,
                  std::vector<int>& active) {
  order.resize(lengths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return lengths[a] > lengths[b]; });
  active.clear();
  if (order.empty()) return;
  const int max_len = lengths[order[0]];
  active.assign(static_cast<std::size_t>(max_len), 0);
  for (int len : lengths)
    for (int k = 0; k < len; ++k) ++active[static_cast<std::size_t>(k)];
}

void check_segment(const SegmentView& s, int feature_dim, const char* who) {
  if (s.frames == nullptr) return;
  if (s.frames->cols() != feature_dim) {
    std::ostringstream os;
    os << who << ": frames have " << s.frames->cols()
       << " dims, model expects " << feature_dim;
    throw ShapeError(os.str());
  }
  if (s.segment.begin < 0 || s.segment.end > s.frames->rows() ||
      s.segment.length() < 1) {
    std::ostringstream os;
    os << who << ": segment [" << s.segment.begin + 1 << ", " << s.segment.end
       << "] outside [1, " << s.frames->rows() << "]";
    throw InputError(os.str());
  }
}

std::vector<SegmentView> utterance_segments(const FeatureMatrix& f,
                                            const BoundarySet& b) {
  if (b.num_frames() != f.num_frames()) {
    std::ostringstream os;
    os << "boundary set covers " << b.num_frames() << " frames, utterance "
       << f.id << " has " << f.num_frames();
    throw InputError(os.str());
  }
  std::vector<SegmentView> views;
  for (const Segment& s : b.segments()) views.push_back({&f.frames, s});
  return views;
}

}  // namespace

// ---------------------------------------------------------------------------

AutoencoderParams AutoencoderParams::zeros(const SsaeDims& dims) {
  AutoencoderParams p;
  p.encoder.cell = LstmCellParams(dims.feature_dim, dims.encoder_hidden);
  p.decoder.cell = LstmCellParams(dims.feature_dim, dims.decoder_hidden);
  p.decoder.w_init = Matrix::Zero(dims.decoder_hidden, dims.encoder_hidden);
  p.decoder.b_init = Matrix::Zero(dims.decoder_hidden, 1);
  p.decoder.w_out = Matrix::Zero(dims.feature_dim, dims.decoder_hidden);
  p.decoder.b_out = Matrix::Zero(dims.feature_dim, 1);
  return p;
}

AutoencoderParams AutoencoderParams::initialized(const SsaeDims& dims, Rng& rng) {
  AutoencoderParams p = zeros(dims);
  p.encoder.cell.initialize(rng);
  p.decoder.cell.initialize(rng);
  fill_uniform(p.decoder.w_init, 0.08, rng);
  fill_uniform(p.decoder.w_out, 0.08, rng);
  return p;
}

GateParams GateParams::zeros(const SsaeDims& dims) {
  GateParams p;
  int in = dims.gate_input_dim();
  for (int l = 0; l < dims.gate_layers; ++l) {
    p.layers.emplace_back(in, dims.gate_hidden);
    in = dims.gate_hidden;
  }
  p.w_pi = Matrix::Zero(2, in);
  p.b_pi = Matrix::Zero(2, 1);
  return p;
}

GateParams GateParams::initialized(const SsaeDims& dims, Rng& rng) {
  GateParams p = zeros(dims);
  for (auto& layer : p.layers) layer.initialize(rng);
  fill_uniform(p.w_pi, 0.08, rng);
  return p;
}

int GateParams::input_dim() const {
  return layers.empty() ? static_cast<int>(w_pi.cols()) : layers[0].input_dim();
}

SsaeParams SsaeParams::zeros(const SsaeDims& dims) {
  return SsaeParams{dims, AutoencoderParams::zeros(dims), GateParams::zeros(dims)};
}

SsaeParams SsaeParams::initialized(const SsaeDims& dims, Rng& rng) {
  SsaeParams p{dims, AutoencoderParams::zeros(dims), GateParams::zeros(dims)};
  p.autoencoder = AutoencoderParams::initialized(dims, rng);
  p.gate = GateParams::initialized(dims, rng);
  return p;
}

// ---------------------------------------------------------------------------
// Gate

GateBatch::GateBatch(const GateParams& params,
                     std::span<const GateEpisode> episodes)
    : params_(params), episodes_(episodes.begin(), episodes.end()) {
  if (episodes_.empty()) throw InputError("GateBatch: no episodes");
  std::vector<int> lengths;
  for (const auto& e : episodes_) {
    if (e.frames == nullptr || e.gas == nullptr)
      throw InputError("GateBatch: episode without frames or GAS");
    if (e.frames->rows() < 1) throw InputError("GateBatch: empty utterance");
    if (e.gas->rows() != e.frames->rows()) {
      std::ostringstream os;
      os << "GateBatch: GAS has " << e.gas->rows() << " rows, utterance has "
         << e.frames->rows() << " frames";
      throw ShapeError(os.str());
    }
    if (e.frames->cols() + e.gas->cols() + 1 != params_.input_dim()) {
      std::ostringstream os;
      os << "GateBatch: gate state would have "
         << e.frames->cols() + e.gas->cols() + 1 << " dims, gate expects "
         << params_.input_dim();
      throw ShapeError(os.str());
    }
    lengths.push_back(e.num_frames());
  }
  length_order(lengths, order_, active_);
}

void GateBatch::run_given(const std::vector<ActionSequence>& actions) {
  if (actions.size() != episodes_.size())
    throw InputError("GateBatch: one action sequence per episode required");
  for (std::size_t e = 0; e < episodes_.size(); ++e)
    if (static_cast<int>(actions[e].size()) != episodes_[e].num_frames())
      throw InputError("GateBatch: action sequence length differs from T");
  run(&actions, DecodeMode::kGreedy, nullptr);
}

void GateBatch::run_decide(DecodeMode mode, Rng* rng) {
  if (mode == DecodeMode::kSample && rng == nullptr)
    throw InputError("GateBatch: sampling requires an RNG");
  run(nullptr, mode, rng);
}

void GateBatch::run(const std::vector<ActionSequence>* given, DecodeMode mode,
                    Rng* rng) {
  const int num = static_cast<int>(episodes_.size());
  tape_ = std::make_unique<LstmTape>(params_.layers, num);
  top_h_.clear();
  actions_.assign(episodes_.size(), {});
  probs_.assign(episodes_.size(), {});
  for (int e = 0; e < num; ++e) {
    actions_[e].assign(static_cast<std::size_t>(episodes_[e].num_frames()),
                       Action::kPass);
    probs_[e] = Matrix::Zero(episodes_[e].num_frames(), 2);
  }
  const int in_dim = params_.input_dim();
  std::vector<double> prev(static_cast<std::size_t>(num), 1.0);  // a_0 = segment
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t t = 0; t < active_.size(); ++t) {
    const int n = active_[t];
    Matrix state(in_dim, n);
    for (int j = 0; j < n; ++j) {
      const GateEpisode& ep = episodes_[order_[j]];
      const int d = static_cast<int>(ep.frames->cols());
      const int dg = static_cast<int>(ep.gas->cols());
      state.block(0, j, d, 1) = ep.frames->row(static_cast<Eigen::Index>(t)).transpose();
      state.block(d, j, dg, 1) = ep.gas->row(static_cast<Eigen::Index>(t)).transpose();
      state(d + dg, j) = prev[static_cast<std::size_t>(j)];
    }
    const Matrix& h = tape_->step(state);
    top_h_.push_back(h);
    Matrix logits = params_.w_pi * h;
    logits.colwise() += params_.b_pi.col(0);
    for (int j = 0; j < n; ++j) {
      const int e = order_[j];
      const double m = std::max(logits(0, j), logits(1, j));
      const double e0 = std::exp(logits(0, j) - m);
      const double e1 = std::exp(logits(1, j) - m);
      const double p_seg = e0 / (e0 + e1);
      const double p_pass = e1 / (e0 + e1);
      probs_[e](static_cast<Eigen::Index>(t), 0) = p_seg;
      probs_[e](static_cast<Eigen::Index>(t), 1) = p_pass;
      Action a;
      if (given != nullptr) {
        a = (*given)[e][t];
      } else if (mode == DecodeMode::kGreedy) {
        a = p_seg > p_pass ? Action::kSegment : Action::kPass;
      } else {
        a = unit(*rng) < p_seg ? Action::kSegment : Action::kPass;
      }
      actions_[e][t] = a;
      prev[static_cast<std::size_t>(j)] = a == Action::kSegment ? 1.0 : 0.0;
    }
  }
}

Vector GateBatch::log_probs(int episode) const {
  const Matrix& p = probs_.at(static_cast<std::size_t>(episode));
  Vector out(p.rows());
  for (Eigen::Index t = 0; t < p.rows(); ++t)
    out(t) = std::log(p(t, actions_[episode][t] == Action::kSegment ? 0 : 1));
  return out;
}

void GateBatch::backward(const std::vector<Matrix>& d_logits,
                         GateParams& grads) {
  if (!tape_) throw InputError("GateBatch: backward before run");
  if (d_logits.size() != episodes_.size())
    throw ShapeError("GateBatch: one logit gradient per episode required");
  for (std::size_t e = 0; e < episodes_.size(); ++e)
    require_shape(d_logits[e], episodes_[e].num_frames(), 2,
                  "GateBatch d_logits");
  for (int t = static_cast<int>(active_.size()) - 1; t >= 0; --t) {
    const int n = active_[static_cast<std::size_t>(t)];
    Matrix dl(2, n);
    for (int j = 0; j < n; ++j)
      dl.col(j) = d_logits[order_[j]].row(t).transpose();
    grads.w_pi.noalias() += dl * top_h_[static_cast<std::size_t>(t)].transpose();
    grads.b_pi.col(0) += dl.rowwise().sum();
    const Matrix dh = params_.w_pi.transpose() * dl;
    tape_->backward_step(dh, grads.layers);
  }
  tape_.reset();
  top_h_.clear();
}

PolicyOutput gate_forward(const SsaeParams& params, const FeatureMatrix& f,
                          const RowMatrix& gas, const ActionSequence& actions) {
  const int T = f.num_frames();
  if (static_cast<int>(actions.size()) < T - 1)
    throw InputError("gate_forward: action history shorter than T-1");
  ActionSequence given(actions.begin(),
                       actions.begin() + std::min<std::size_t>(actions.size(),
                                                               static_cast<std::size_t>(T)));
  given.resize(static_cast<std::size_t>(T), Action::kPass);
  GateEpisode ep{&f.frames, &gas};
  GateBatch batch(params.gate, std::span<const GateEpisode>(&ep, 1));
  batch.run_given({given});
  return PolicyOutput{batch.probs()[0]};
}

ActionSequence decide_actions(const PolicyOutput& policy, DecodeMode mode,
                              Rng* rng) {
  if (mode == DecodeMode::kSample && rng == nullptr)
    throw InputError("decide_actions: sampling requires an RNG");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ActionSequence out;
  out.reserve(static_cast<std::size_t>(policy.num_frames()));
  for (int t = 0; t < policy.num_frames(); ++t) {
    const double p_seg = policy.probs(t, 0);
    if (mode == DecodeMode::kGreedy)
      out.push_back(p_seg > policy.probs(t, 1) ? Action::kSegment : Action::kPass);
    else
      out.push_back(unit(*rng) < p_seg ? Action::kSegment : Action::kPass);
  }
  return out;
}

Rollout rollout(const SsaeParams& params, const FeatureMatrix& f,
                const RowMatrix& gas, DecodeMode mode, Rng* rng) {
  GateEpisode ep{&f.frames, &gas};
  GateBatch batch(params.gate, std::span<const GateEpisode>(&ep, 1));
  batch.run_decide(mode, rng);
  return Rollout{batch.actions()[0], PolicyOutput{batch.probs()[0]}};
}

BoundarySet actions_to_boundaries(const ActionSequence& actions) {
  const int T = static_cast<int>(actions.size());
  if (T == 0) throw InputError("actions_to_boundaries: empty action sequence");
  std::vector<int> ends;
  for (int t = 0; t < T; ++t)
    if (actions[static_cast<std::size_t>(t)] == Action::kSegment) ends.push_back(t + 1);
  if (ends.empty() || ends.back() != T) ends.push_back(T);
  return BoundarySet::from_ends(std::move(ends), T);
}

ActionSequence boundaries_to_actions(const BoundarySet& boundaries) {
  ActionSequence a(static_cast<std::size_t>(boundaries.num_frames()), Action::kPass);
  for (int e : boundaries.ends()) a[static_cast<std::size_t>(e - 1)] = Action::kSegment;
  return a;
}

// ---------------------------------------------------------------------------
// Encoder

EncoderBatch::EncoderBatch(const EncoderParams& params,
                           std::span<const SegmentView> segments)
    : params_(params), segments_(segments.begin(), segments.end()) {
  const int hd = params_.cell.hidden_dim();
  std::vector<int> lengths;
  for (const auto& s : segments_) {
    if (s.frames == nullptr) throw InputError("EncoderBatch: segment without frames");
    check_segment(s, params_.cell.input_dim(), "encoder");
    lengths.push_back(s.segment.length());
  }
  length_order(lengths, order_, active_);
  embeddings_ = Matrix::Zero(hd, static_cast<Eigen::Index>(segments_.size()));
  if (segments_.empty()) return;
  tape_ = std::make_unique<LstmTape>(std::span<const LstmCellParams>(&params_.cell, 1),
                                     static_cast<int>(segments_.size()));
  const int d = params_.cell.input_dim();
  const int steps = static_cast<int>(active_.size());
  for (int k = 0; k < steps; ++k) {
    const int n = active_[static_cast<std::size_t>(k)];
    Matrix x(d, n);
    for (int j = 0; j < n; ++j) {
      const SegmentView& s = segments_[static_cast<std::size_t>(order_[j])];
      x.col(j) = s.frames->row(s.segment.begin + k).transpose();
    }
    const Matrix& h = tape_->step(x);
    const int n_next = k + 1 < steps ? active_[static_cast<std::size_t>(k + 1)] : 0;
    for (int j = n_next; j < n; ++j) embeddings_.col(order_[j]) = h.col(j);
  }
}

void EncoderBatch::backward(const Matrix& d_embeddings, EncoderParams& grads) {
  require_shape(d_embeddings, embeddings_.rows(), embeddings_.cols(),
                "EncoderBatch d_embeddings");
  if (!tape_) return;
  const int hd = params_.cell.hidden_dim();
  const int steps = static_cast<int>(active_.size());
  for (int k = steps - 1; k >= 0; --k) {
    const int n = active_[static_cast<std::size_t>(k)];
    const int n_next = k + 1 < steps ? active_[static_cast<std::size_t>(k + 1)] : 0;
    Matrix dh = Matrix::Zero(hd, n);
    for (int j = n_next; j < n; ++j) dh.col(j) = d_embeddings.col(order_[j]);
    tape_->backward_step(dh, std::span<LstmCellParams>(&grads.cell, 1));
  }
  tape_.reset();
}

// ---------------------------------------------------------------------------
// Decoder

DecoderBatch::DecoderBatch(const DecoderParams& params, const Matrix& embeddings,
                           std::span<const SegmentView> segments,
                           const DecoderOptions& options)
    : params_(params), segments_(segments.begin(), segments.end()),
      options_(options) {
  const int d = static_cast<int>(params_.w_out.rows());
  const int num = static_cast<int>(segments_.size());
  require_shape(embeddings, params_.w_init.cols(), num, "decoder embeddings");
  std::vector<int> lengths;
  for (const auto& s : segments_) {
    check_segment(s, d, "decoder");
    if (s.segment.length() < 1) throw InputError("decoder: empty segment");
    if (options_.teacher_forcing && s.frames == nullptr)
      throw InputError("decoder: teacher forcing needs the original frames");
    lengths.push_back(s.segment.length());
  }
  length_order(lengths, order_, active_);
  segment_losses_.assign(segments_.size(), 0.0);
  if (num == 0) return;

  embeddings_sorted_.resize(embeddings.rows(), num);
  for (int j = 0; j < num; ++j) embeddings_sorted_.col(j) = embeddings.col(order_[j]);
  Matrix h0 = params_.w_init * embeddings_sorted_;
  h0.colwise() += params_.b_init.col(0);
  tape_ = std::make_unique<LstmTape>(std::span<const LstmCellParams>(&params_.cell, 1),
                                     num, std::vector<Matrix>{std::move(h0)});
  const int steps = static_cast<int>(active_.size());
  for (int k = 0; k < steps; ++k) {
    const int n = active_[static_cast<std::size_t>(k)];
    Matrix x(d, n);
    if (k == 0) {
      x.setZero();
    } else if (options_.teacher_forcing) {
      for (int j = 0; j < n; ++j) {
        const SegmentView& s = segments_[static_cast<std::size_t>(order_[j])];
        x.col(j) = s.frames->row(s.segment.end - k).transpose();
      }
    } else {
      x = outputs_.back().leftCols(n);
    }
    const Matrix& h = tape_->step(x);
    hidden_.push_back(h);
    Matrix y = params_.w_out * h;
    y.colwise() += params_.b_out.col(0);
    Matrix target = Matrix::Zero(d, n);
    for (int j = 0; j < n; ++j) {
      const SegmentView& s = segments_[static_cast<std::size_t>(order_[j])];
      if (s.frames == nullptr) continue;
      target.col(j) = s.frames->row(s.segment.end - 1 - k).transpose();
      segment_losses_[static_cast<std::size_t>(order_[j])] +=
          (y.col(j) - target.col(j)).squaredNorm() / d;
    }
    outputs_.push_back(std::move(y));
    targets_.push_back(std::move(target));
  }
}

double DecoderBatch::loss() const {
  return std::accumulate(segment_losses_.begin(), segment_losses_.end(), 0.0);
}

RowMatrix DecoderBatch::reconstruction(int s) const {
  const auto it = std::find(order_.begin(), order_.end(), s);
  if (it == order_.end()) throw InputError("DecoderBatch: no such segment");
  const int j = static_cast<int>(it - order_.begin());
  const int len = segments_[static_cast<std::size_t>(s)].segment.length();
  RowMatrix out(len, params_.w_out.rows());
  for (int k = 0; k < len; ++k)
    out.row(len - 1 - k) = outputs_[static_cast<std::size_t>(k)].col(j).transpose();
  return out;
}

Matrix DecoderBatch::backward(DecoderParams& grads,
                              std::span<const double> weights) {
  const int num = static_cast<int>(segments_.size());
  Matrix d_emb = Matrix::Zero(params_.w_init.cols(), num);
  if (!tape_) return d_emb;
  for (const auto& s : segments_)
    if (s.frames == nullptr)
      throw InputError("DecoderBatch: backward needs targets for every segment");
  if (!weights.empty() && weights.size() != segments_.size())
    throw ShapeError("DecoderBatch: one loss weight per segment required");
  const double d = static_cast<double>(params_.w_out.rows());
  const int steps = static_cast<int>(active_.size());
  Vector col_scale = Vector::Constant(num, 2.0 / d);
  if (!weights.empty())
    for (int j = 0; j < num; ++j) col_scale(j) *= weights[static_cast<std::size_t>(order_[j])];
  Matrix d_input_next;
  for (int k = steps - 1; k >= 0; --k) {
    const Eigen::Index n = outputs_[static_cast<std::size_t>(k)].cols();
    Matrix dy = (outputs_[static_cast<std::size_t>(k)] -
                 targets_[static_cast<std::size_t>(k)]) *
                col_scale.head(n).asDiagonal();
    if (!options_.teacher_forcing && d_input_next.size() > 0)
      dy.leftCols(d_input_next.cols()) += d_input_next;
    grads.w_out.noalias() += dy * hidden_[static_cast<std::size_t>(k)].transpose();
    grads.b_out.col(0) += dy.rowwise().sum();
    const Matrix dh = params_.w_out.transpose() * dy;
    d_input_next = tape_->backward_step(dh, std::span<LstmCellParams>(&grads.cell, 1));
  }
  const Matrix& dh0 = tape_->initial_h_grads().at(0);
  grads.w_init.noalias() += dh0 * embeddings_sorted_.transpose();
  grads.b_init.col(0) += dh0.rowwise().sum();
  const Matrix d_sorted = params_.w_init.transpose() * dh0;
  for (int j = 0; j < num; ++j) d_emb.col(order_[j]) = d_sorted.col(j);
  tape_.reset();
  return d_emb;
}

AutoencoderResult autoencoder_loss(const AutoencoderParams& params,
                                   std::span<const SegmentView> segments,
                                   const DecoderOptions& options,
                                   AutoencoderParams* grads) {
  EncoderBatch enc(params.encoder, segments);
  DecoderBatch dec(params.decoder, enc.embeddings(), segments, options);
  AutoencoderResult out{dec.loss(), dec.segment_losses()};
  if (grads != nullptr) {
    const Matrix d_emb = dec.backward(grads->decoder);
    enc.backward(d_emb, grads->encoder);
  }
  return out;
}

EmbeddingSequence encode_segments(const AutoencoderParams& params,
                                  const FeatureMatrix& f,
                                  const BoundarySet& boundaries) {
  const auto views = utterance_segments(f, boundaries);
  EncoderBatch enc(params.encoder, views);
  return EmbeddingSequence{enc.embeddings().transpose()};
}

EmbeddingSequence encode_segments(const SsaeParams& params,
                                  const FeatureMatrix& f,
                                  const BoundarySet& boundaries) {
  return encode_segments(params.autoencoder, f, boundaries);
}

RowMatrix decode_segments(const AutoencoderParams& params,
                          const EmbeddingSequence& y,
                          const BoundarySet& boundaries) {
  if (y.size() != boundaries.num_segments()) {
    std::ostringstream os;
    os << "decode_segments: " << y.size() << " embeddings for "
       << boundaries.num_segments() << " segments";
    throw InputError(os.str());
  }
  std::vector<SegmentView> views;
  for (const Segment& s : boundaries.segments()) views.push_back({nullptr, s});
  DecoderBatch dec(params.decoder, y.vectors.transpose(), views);
  RowMatrix out(boundaries.num_frames(), params.decoder.w_out.rows());
  for (int n = 0; n < boundaries.num_segments(); ++n) {
    const Segment s = boundaries.segment(n);
    out.middleRows(s.begin, s.length()) = dec.reconstruction(n);
  }
  return out;
}

RowMatrix decode_segments(const SsaeParams& params, const EmbeddingSequence& y,
                          const BoundarySet& boundaries) {
  return decode_segments(params.autoencoder, y, boundaries);
}

double reconstruction_loss(const RowMatrix& original,
                           const RowMatrix& reconstructed) {
  if (original.rows() != reconstructed.rows() ||
      original.cols() != reconstructed.cols()) {
    std::ostringstream os;
    os << "reconstruction_loss: " << original.rows() << "x" << original.cols()
       << " vs " << reconstructed.rows() << "x" << reconstructed.cols();
    throw ShapeError(os.str());
  }
  if (original.cols() == 0) return 0.0;
  return (reconstructed - original).squaredNorm() /
         static_cast<double>(original.cols());
}

}  // namespace segaw
