// src/pipeline/gradcheck.cc

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

#include "segaw/pipeline/gradcheck.h"

#include "segaw/gas/gas.h"
#include "segaw/model/ssae.h"

namespace segaw {

namespace {

SsaeDims small_dims() {
  SsaeDims d;
  d.feature_dim = 3;
  d.gas_dim = 2;
  d.encoder_hidden = 4;
  d.decoder_hidden = 3;
  d.gate_hidden = 4;
  d.gate_layers = 2;
  return d;
}

RowMatrix uniform_rows(int T, int d, double scale, Rng& rng) {
  Matrix m(T, d);
  fill_uniform(m, scale, rng);
  return m;
}

// Larger-than-default weights so gradients are not all tiny.
template <class P>
void scramble(P& p, Rng& rng, double scale) {
  visit_params(p, "", [&](const std::string&, Matrix& m) { fill_uniform(m, scale, rng); });
}

GradCheckReport reconstruction_check(std::uint64_t seed, bool teacher_forcing) {
  Rng rng(seed);
  SsaeParams p = SsaeParams::initialized(small_dims(), rng);
  scramble(p, rng, 0.5);
  const RowMatrix x = uniform_rows(6, 3, 1.0, rng);
  const BoundarySet b = BoundarySet::from_ends({2, 3, 6}, 6);
  std::vector<SegmentView> views;
  for (const Segment& s : b.segments()) views.push_back({&x, s});
  const DecoderOptions options{teacher_forcing};
  AutoencoderParams grads = zeros_like(p.autoencoder);
  autoencoder_loss(p.autoencoder, views, options, &grads);
  return finite_diff_check(
      [&] { return autoencoder_loss(p.autoencoder, views, options, nullptr).loss; },
      param_list(p.autoencoder), param_list(grads));
}

GradCheckReport gate_check(std::uint64_t seed) {
  Rng rng(seed);
  SsaeParams p = SsaeParams::initialized(small_dims(), rng);
  scramble(p, rng, 0.8);
  std::vector<RowMatrix> xs, gs;
  for (int T : {4, 6, 3}) {
    xs.push_back(uniform_rows(T, 3, 1.0, rng));
    gs.push_back((uniform_rows(T, 2, 0.5, rng).array() + 0.5).matrix());
  }
  std::vector<GateEpisode> episodes;
  for (std::size_t i = 0; i < xs.size(); ++i) episodes.push_back({&xs[i], &gs[i]});
  std::vector<ActionSequence> actions;
  std::vector<Vector> weights;
  std::bernoulli_distribution coin(0.5);
  for (const auto& x : xs) {
    ActionSequence a;
    for (Eigen::Index t = 0; t < x.rows(); ++t) a.push_back(coin(rng) ? Action::kSegment : Action::kPass);
    actions.push_back(a);
    Matrix w(x.rows(), 1);
    fill_uniform(w, 1.0, rng);
    weights.push_back(w);
  }
  // L = Σ_e Σ_t w_et log π_t(a_t)
  auto loss = [&] {
    GateBatch batch(p.gate, episodes);
    batch.run_given(actions);
    double l = 0;
    for (std::size_t e = 0; e < episodes.size(); ++e)
      l += weights[e].dot(batch.log_probs(static_cast<int>(e)));
    return l;
  };
  GateBatch batch(p.gate, episodes);
  batch.run_given(actions);
  std::vector<Matrix> d_log;
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    Matrix d = -batch.probs()[e];
    for (Eigen::Index t = 0; t < d.rows(); ++t)
      d(t, actions[e][static_cast<std::size_t>(t)] == Action::kSegment ? 0 : 1) += 1.0;
    d_log.push_back(weights[e].asDiagonal() * d);
  }
  GateParams grads = zeros_like(p.gate);
  batch.backward(d_log, grads);
  return finite_diff_check(loss, param_list(p.gate), param_list(grads));
}

GradCheckReport gas_check(std::uint64_t seed) {
  Rng rng(seed);
  GasModel m(3, 4);
  scramble(m, rng, 0.6);
  std::vector<RowMatrix> seqs;
  for (int T : {3, 5, 2}) seqs.push_back(uniform_rows(T, 3, 1.0, rng));
  std::vector<const RowMatrix*> ptrs;
  for (const auto& s : seqs) ptrs.push_back(&s);
  GasModel grads = zeros_like(m);
  gas_reconstruction_loss(m, ptrs, &grads);
  return finite_diff_check([&] { return gas_reconstruction_loss(m, ptrs); }, param_list(m),
                           param_list(grads));
}

}  // namespace

std::vector<NamedGradCheck> run_gradchecks(std::uint64_t seed) {
  return {
      {"reconstruction", reconstruction_check(derive_seed(seed, "reconstruction"), false)},
      {"reconstruction_teacher_forced",
       reconstruction_check(derive_seed(seed, "reconstruction-tf"), true)},
      {"gate_log_policy", gate_check(derive_seed(seed, "gate"))},
      {"gas_autoencoder", gas_check(derive_seed(seed, "gas"))},
  };
}

}  // namespace segaw
