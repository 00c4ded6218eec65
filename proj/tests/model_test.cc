// tests/model_test.cc

// Copyright 2026  segaw authors

// See ../COPYING for clarification regarding multiple authors
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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "segaw/core/optim.h"
#include "segaw/model/ssae.h"

using namespace segaw;

namespace {

FeatureMatrix random_features(int T, int d, Rng& rng, const std::string& id = "u") {
  FeatureMatrix f;
  f.id = id;
  Matrix m(T, d);
  fill_uniform(m, 1.0, rng);
  f.frames = m;
  return f;
}

RowMatrix random_gas(int T, int dg, Rng& rng) {
  Matrix m(T, dg);
  fill_uniform(m, 0.5, rng);
  return (m.array() + 0.5).matrix();
}

SsaeDims tiny_dims() {
  SsaeDims d;
  d.feature_dim = 3;
  d.gas_dim = 2;
  d.encoder_hidden = 4;
  d.decoder_hidden = 3;
  d.gate_hidden = 4;
  d.gate_layers = 2;
  return d;
}

// Larger-than-default weights so gradients are not all tiny.
void scramble(SsaeParams& p, Rng& rng, double scale) {
  visit_params(p, "", [&](const std::string&, Matrix& m) { fill_uniform(m, scale, rng); });
}

}  // namespace

TEST_CASE("gate_forward") {
  Rng rng(1);
  const SsaeDims dims = tiny_dims();
  const FeatureMatrix f = random_features(6, 3, rng);
  const RowMatrix g = random_gas(6, 2, rng);
  ActionSequence acts(6, Action::kPass);

  SUBCASE("zero weights give a uniform policy") {
    const SsaeParams p = SsaeParams::zeros(dims);
    const PolicyOutput pi = gate_forward(p, f, g, acts);
    CHECK(pi.num_frames() == 6);
    for (int t = 0; t < 6; ++t) {
      CHECK(pi.probs(t, 0) == 0.5);
      CHECK(pi.probs(t, 1) == 0.5);
    }
  }
  SUBCASE("T = 1") {
    const SsaeParams p = SsaeParams::initialized(dims, rng);
    const FeatureMatrix one = random_features(1, 3, rng);
    const PolicyOutput pi = gate_forward(p, one, random_gas(1, 2, rng), {});
    CHECK(pi.num_frames() == 1);
    CHECK(pi.probs.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("replay is bit-identical and rows are distributions") {
    SsaeParams p = SsaeParams::initialized(dims, rng);
    scramble(p, rng, 0.7);
    acts = {Action::kSegment, Action::kPass, Action::kPass, Action::kSegment,
            Action::kPass, Action::kPass};
    const PolicyOutput a = gate_forward(p, f, g, acts);
    const PolicyOutput b = gate_forward(p, f, g, acts);
    CHECK(a.probs == b.probs);
    for (int t = 0; t < 6; ++t) {
      CHECK(std::abs(a.probs.row(t).sum() - 1.0) < 1e-9);
      CHECK(a.probs(t, 0) > 0.0);
      CHECK(a.probs(t, 0) < 1.0);
    }
    // The action at t only affects later frames.
    ActionSequence flipped = acts;
    flipped[3] = Action::kPass;
    const PolicyOutput c = gate_forward(p, f, g, flipped);
    CHECK(c.probs.topRows(4) == a.probs.topRows(4));
    CHECK(c.probs.row(4) != a.probs.row(4));
  }
  SUBCASE("GAS rows must match T") {
    const SsaeParams p = SsaeParams::zeros(dims);
    CHECK_THROWS_AS(gate_forward(p, f, random_gas(5, 2, rng), acts), ShapeError);
    CHECK_THROWS_AS(gate_forward(p, f, random_gas(6, 3, rng), acts), ShapeError);
  }
}

TEST_CASE("decide_actions") {
  PolicyOutput pi{Matrix(5, 2)};
  pi.probs.col(0).setConstant(0.9);
  pi.probs.col(1).setConstant(0.1);
  const auto greedy = decide_actions(pi, DecodeMode::kGreedy);
  CHECK(std::all_of(greedy.begin(), greedy.end(),
                    [](Action a) { return a == Action::kSegment; }));
  CHECK(decide_actions(pi, DecodeMode::kGreedy) == greedy);

  pi.probs.setConstant(0.5);
  const auto ties = decide_actions(pi, DecodeMode::kGreedy);
  CHECK(std::all_of(ties.begin(), ties.end(), [](Action a) { return a == Action::kPass; }));

  PolicyOutput half{Matrix::Constant(10000, 2, 0.5)};
  Rng rng(4);
  const auto sampled = decide_actions(half, DecodeMode::kSample, &rng);
  const double freq =
      std::count(sampled.begin(), sampled.end(), Action::kSegment) / 10000.0;
  CHECK(std::abs(freq - 0.5) < 0.02);
  CHECK_THROWS_AS(decide_actions(half, DecodeMode::kSample, nullptr), InputError);
}

TEST_CASE("rollout feeds decisions back and greedy is deterministic") {
  Rng rng(8);
  SsaeParams p = SsaeParams::initialized(tiny_dims(), rng);
  scramble(p, rng, 1.0);
  const FeatureMatrix f = random_features(12, 3, rng);
  const RowMatrix g = random_gas(12, 2, rng);
  const Rollout a = rollout(p, f, g, DecodeMode::kGreedy);
  const Rollout b = rollout(p, f, g, DecodeMode::kGreedy);
  CHECK(a.actions == b.actions);
  // The policy of a greedy rollout equals the teacher-forced policy of its actions.
  CHECK(gate_forward(p, f, g, a.actions).probs == a.policy.probs);

  Rng r1(5), r2(5);
  const Rollout s1 = rollout(p, f, g, DecodeMode::kSample, &r1);
  const Rollout s2 = rollout(p, f, g, DecodeMode::kSample, &r2);
  CHECK(s1.actions == s2.actions);
  CHECK(gate_forward(p, f, g, s1.actions).probs == s1.policy.probs);
}

TEST_CASE("actions_to_boundaries") {
  const auto S = Action::kSegment, P = Action::kPass;
  auto b = actions_to_boundaries({P, S, P, P, S});
  CHECK(b.ends() == std::vector<int>{2, 5});
  CHECK(b.num_segments() == 2);
  CHECK(b.segment(0) == Segment{0, 2});
  CHECK(b.segment(1) == Segment{2, 5});

  b = actions_to_boundaries(ActionSequence(7, P));
  CHECK(b.ends() == std::vector<int>{7});

  b = actions_to_boundaries({S, S, S});
  CHECK(b.num_segments() == 3);

  Rng rng(2);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 200; ++trial) {
    const int T = 1 + static_cast<int>(rng() % 30);
    ActionSequence a;
    for (int t = 0; t < T; ++t) a.push_back(coin(rng) ? S : P);
    const BoundarySet bs = actions_to_boundaries(a);
    CHECK(bs.num_segments() <= T);
    CHECK(bs.ends().back() == T);
    int covered = 0;
    for (const Segment& s : bs.segments()) {
      CHECK(s.begin == covered);
      CHECK(s.length() >= 1);
      covered = s.end;
    }
    CHECK(covered == T);
    CHECK(actions_to_boundaries(boundaries_to_actions(bs)) == bs);
  }
}

TEST_CASE("encoder resets at segment starts") {
  Rng rng(12);
  SsaeDims dims = tiny_dims();
  SsaeParams p = SsaeParams::initialized(dims, rng);
  scramble(p, rng, 0.6);
  FeatureMatrix f = random_features(6, 3, rng);
  const BoundarySet split = BoundarySet::from_ends({3, 6}, 6);
  const EmbeddingSequence y = encode_segments(p, f, split);
  CHECK(y.size() == 2);
  CHECK(y.dim() == dims.encoder_hidden);

  FeatureMatrix first;
  first.frames = f.frames.topRows(3);
  const EmbeddingSequence alone = encode_segments(p, first, BoundarySet::whole(3));
  CHECK(alone.vectors.row(0) == y.vectors.row(0));

  FeatureMatrix permuted = f;
  permuted.frames.row(3).swap(permuted.frames.row(5));
  const EmbeddingSequence y2 = encode_segments(p, permuted, split);
  CHECK(y2.vectors.row(0) == y.vectors.row(0));
  CHECK(y2.vectors.row(1) != y.vectors.row(1));

  // Whole utterance as one segment equals a plain LSTM run.
  const EmbeddingSequence whole = encode_segments(p, f, BoundarySet::whole(6));
  LstmState s{Vector::Zero(dims.encoder_hidden), Vector::Zero(dims.encoder_hidden)};
  Vector out;
  for (int t = 0; t < 6; ++t) {
    const auto r = lstm_step(p.autoencoder.encoder.cell, s, f.frames.row(t).transpose());
    s = r.state;
    out = r.output;
  }
  for (int u = 0; u < dims.encoder_hidden; ++u)
    CHECK(whole.vectors(0, u) == doctest::Approx(out(u)).epsilon(1e-14));

  CHECK_THROWS_AS(encode_segments(p, f, BoundarySet::whole(7)), InputError);
}

TEST_CASE("decoder") {
  Rng rng(13);
  SsaeDims dims = tiny_dims();
  SsaeParams p = SsaeParams::initialized(dims, rng);
  scramble(p, rng, 0.6);
  FeatureMatrix f = random_features(7, 3, rng);
  const BoundarySet b = BoundarySet::from_ends({2, 5, 7}, 7);
  EmbeddingSequence y = encode_segments(p, f, b);
  const RowMatrix rec = decode_segments(p, y, b);
  CHECK(rec.rows() == 7);
  CHECK(rec.cols() == 3);

  EmbeddingSequence y2 = y;
  y2.vectors.row(0).array() += 0.3;
  const RowMatrix rec2 = decode_segments(p, y2, b);
  CHECK(rec2.bottomRows(5) == rec.bottomRows(5));
  CHECK(rec2.topRows(2) != rec.topRows(2));

  EmbeddingSequence short_y{y.vectors.topRows(2)};
  CHECK_THROWS_AS(decode_segments(p, short_y, b), InputError);

  SUBCASE("cross-segment gradients are exactly zero") {
    std::vector<SegmentView> views;
    for (const Segment& s : b.segments()) views.push_back({&f.frames, s});
    const Matrix emb = y.vectors.transpose();
    for (int n = 0; n < 3; ++n) {
      for (bool tf : {false, true}) {
        DecoderBatch dec(p.autoencoder.decoder, emb, views, DecoderOptions{tf});
        std::vector<double> w(3, 0.0);
        w[static_cast<std::size_t>(n)] = 1.0;
        DecoderParams g = zeros_like(p.autoencoder.decoder);
        const Matrix d_emb = dec.backward(g, w);
        for (int m = 0; m < 3; ++m) {
          if (m == n)
            CHECK(d_emb.col(m).norm() > 0.0);
          else
            CHECK(d_emb.col(m).isZero(0.0));
        }
      }
    }
  }
}

TEST_CASE("reconstruction_loss") {
  RowMatrix x = RowMatrix::Random(2, 39);
  CHECK(reconstruction_loss(x, x) == 0.0);
  RowMatrix xh = (x.array() + 1.0).matrix();
  CHECK(reconstruction_loss(x, xh) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(reconstruction_loss(x, RowMatrix::Zero(3, 39)), ShapeError);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    Matrix a(4, 5), c(4, 5);
    fill_uniform(a, 3.0, rng);
    fill_uniform(c, 3.0, rng);
    CHECK(reconstruction_loss(a, c) >= 0.0);
  }
}

TEST_CASE("batched decoder reconstruction matches the single-utterance path") {
  Rng rng(14);
  SsaeParams p = SsaeParams::initialized(tiny_dims(), rng);
  scramble(p, rng, 0.5);
  FeatureMatrix f = random_features(9, 3, rng);
  const BoundarySet b = BoundarySet::from_ends({4, 5, 9}, 9);
  std::vector<SegmentView> views;
  for (const Segment& s : b.segments()) views.push_back({&f.frames, s});
  const AutoencoderResult r = autoencoder_loss(p.autoencoder, views, {}, nullptr);
  const RowMatrix rec = decode_segments(p, encode_segments(p, f, b), b);
  CHECK(r.loss == doctest::Approx(reconstruction_loss(f.frames, rec)).epsilon(1e-12));
  double s = 0;
  for (double v : r.segment_losses) s += v;
  CHECK(s == doctest::Approx(r.loss).epsilon(1e-12));
}

TEST_CASE("end-to-end reconstruction gradients pass the finite-difference check") {
  for (bool tf : {false, true}) {
    CAPTURE(tf);
    Rng rng(tf ? 41 : 40);
    SsaeParams p = SsaeParams::initialized(tiny_dims(), rng);
    scramble(p, rng, 0.5);
    FeatureMatrix f = random_features(6, 3, rng);
    const BoundarySet b = BoundarySet::from_ends({2, 6}, 6);
    std::vector<SegmentView> views;
    for (const Segment& s : b.segments()) views.push_back({&f.frames, s});
    AutoencoderParams grads = zeros_like(p.autoencoder);
    autoencoder_loss(p.autoencoder, views, DecoderOptions{tf}, &grads);
    const auto report = finite_diff_check(
        [&] { return autoencoder_loss(p.autoencoder, views, DecoderOptions{tf}, nullptr).loss; },
        param_list(p.autoencoder), param_list(grads));
    INFO(report.worst_param << "[" << report.worst_index << "] " << report.analytic << " vs "
                            << report.numeric);
    CHECK(report.max_relative_error < 1e-4);
  }
}

TEST_CASE("gate log-policy gradients pass the finite-difference check") {
  Rng rng(50);
  SsaeParams p = SsaeParams::initialized(tiny_dims(), rng);
  scramble(p, rng, 0.8);
  std::vector<FeatureMatrix> fs;
  std::vector<RowMatrix> gs;
  for (int T : {4, 6, 3}) {
    fs.push_back(random_features(T, 3, rng));
    gs.push_back(random_gas(T, 2, rng));
  }
  std::vector<GateEpisode> eps;
  for (std::size_t i = 0; i < fs.size(); ++i) eps.push_back({&fs[i].frames, &gs[i]});
  std::vector<ActionSequence> acts;
  std::vector<Vector> weights;
  std::bernoulli_distribution coin(0.5);
  for (const auto& f : fs) {
    ActionSequence a;
    for (int t = 0; t < f.num_frames(); ++t)
      a.push_back(coin(rng) ? Action::kSegment : Action::kPass);
    acts.push_back(a);
    Matrix w(f.num_frames(), 1);
    fill_uniform(w, 1.0, rng);
    weights.push_back(w);
  }
  // L = Σ_e Σ_t w_et log π_t(a_t)
  auto loss = [&] {
    GateBatch batch(p.gate, eps);
    batch.run_given(acts);
    double l = 0;
    for (std::size_t e = 0; e < eps.size(); ++e) l += weights[e].dot(batch.log_probs(static_cast<int>(e)));
    return l;
  };
  GateBatch batch(p.gate, eps);
  batch.run_given(acts);
  std::vector<Matrix> dlog;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    Matrix d = -batch.probs()[e];
    for (int t = 0; t < d.rows(); ++t) d(t, acts[e][t] == Action::kSegment ? 0 : 1) += 1.0;
    dlog.push_back(weights[e].asDiagonal() * d);
  }
  GateParams grads = zeros_like(p.gate);
  batch.backward(dlog, grads);
  const auto report = finite_diff_check(loss, param_list(p.gate), param_list(grads));
  INFO(report.worst_param << "[" << report.worst_index << "]");
  CHECK(report.max_relative_error < 1e-4);
}
