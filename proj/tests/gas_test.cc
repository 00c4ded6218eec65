// tests/gas_test.cc

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

#include "doctest.h"
#include "segaw/core/optim.h"
#include "segaw/gas/gas.h"
#include "segaw/synth/corpus.h"

using namespace segaw;

namespace {

std::vector<FeatureMatrix> features_of(const std::vector<SynthUtterance>& utts) {
  std::vector<FeatureMatrix> out;
  for (const auto& u : utts) out.push_back(u.features);
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("GAS autoencoder gradient") {
  Rng rng(3);
  GasModel m(3, 4);
  visit_params(m, "", [&](const std::string&, Matrix& p) { fill_uniform(p, 0.6, rng); });
  std::vector<RowMatrix> seqs;
  for (int T : {3, 5, 2}) {
    Matrix x(T, 3);
    fill_uniform(x, 1.0, rng);
    seqs.emplace_back(x);
  }
  std::vector<const RowMatrix*> ptrs;
  for (const auto& s : seqs) ptrs.push_back(&s);
  GasModel grads = zeros_like(m);
  gas_reconstruction_loss(m, ptrs, &grads);
  const auto report = finite_diff_check(
      [&] { return gas_reconstruction_loss(m, ptrs); }, param_list(m), param_list(grads));
  CHECK(report.max_relative_error < 1e-4);
}

TEST_CASE("train_gas_autoencoder") {
  SUBCASE("empty corpus") {
    CHECK_THROWS_AS(train_gas_autoencoder({}, GasConfig{}), InputError);
  }

  SUBCASE("tiny corpus halves its loss") {
    SynthConfig sc;
    sc.train_utterances = 10;
    sc.test_utterances = 0;
    sc.min_words = 2;
    sc.max_words = 3;
    sc.seed = 5;
    const auto train = features_of(generate_corpus(sc).train);
    GasConfig gc;
    gc.hidden_dim = 32;
    gc.epochs = 50;
    gc.batch_size = 1;
    gc.learning_rate = 1e-2;
    gc.seed = 1;
    const GasTrainResult r = train_gas_autoencoder(train, gc);
    REQUIRE(r.loss_curve.size() == 50);
    GasConfig untrained = gc;
    untrained.epochs = 0;
    const GasModel initial = train_gas_autoencoder(train, untrained).model;
    CHECK(gas_mse(r.model, train) < 0.5 * gas_mse(initial, train));
  }

  SUBCASE("held-out loss drops below the untrained model") {
    SynthConfig sc;
    sc.train_utterances = 100;
    sc.test_utterances = 50;
    sc.seed = 5;
    const SynthCorpus corpus = generate_corpus(sc);
    GasConfig gc;
    gc.hidden_dim = 32;
    gc.epochs = 10;
    gc.batch_size = 8;
    gc.learning_rate = 3e-3;
    gc.seed = 1;
    const auto train = features_of(corpus.train);
    const auto test = features_of(corpus.test);
    const GasModel trained = train_gas_autoencoder(train, gc).model;
    gc.epochs = 0;
    const GasModel initial = train_gas_autoencoder(train, gc).model;
    CHECK(gas_mse(trained, test) < gas_mse(initial, test));
  }

  SUBCASE("constant utterance is memorized") {
    FeatureMatrix f;
    f.id = "c";
    f.frames = RowMatrix::Constant(12, 2, 0.7);
    GasConfig gc;
    gc.hidden_dim = 8;
    gc.epochs = 300;
    gc.learning_rate = 1e-2;
    const GasTrainResult r = train_gas_autoencoder(std::span(&f, 1), gc);
    CHECK(r.loss_curve.back() < 1e-3);
  }
}

TEST_CASE("extract_gas") {
  Rng rng(2);
  FeatureMatrix f;
  f.id = "u";
  Matrix x(7, 3);
  fill_uniform(x, 2.0, rng);
  f.frames = x;

  GasModel zero(3, 5);
  CHECK_THROWS_AS(extract_gas(zero, f), InputError);
  zero.trained = true;
  const GasSequence g0 = extract_gas(zero, f);
  CHECK(g0.rows() == 7);
  CHECK((g0.array() == 0.5).all());

  GasModel m(3, 5);
  m.initialize(rng);
  visit_params(m, "", [&](const std::string&, Matrix& p) { fill_uniform(p, 4.0, rng); });
  m.trained = true;
  const GasSequence g = extract_gas(m, f);
  CHECK((g.array() > 0.0).all());
  CHECK((g.array() < 1.0).all());
  CHECK(extract_gas(m, f) == g);
  Vector h = Vector::Zero(5);
  for (int t = 0; t < 7; ++t) {
    const GruStepResult s = gru_step(m.encoder, h, f.frames.row(t).transpose());
    CHECK((s.update_gate.transpose() - g.row(t)).cwiseAbs().maxCoeff() < 1e-14);
    h = s.state;
  }

  FeatureMatrix wrong = f;
  wrong.frames = RowMatrix::Zero(4, 2);
  CHECK_THROWS_AS(extract_gas(m, wrong), ShapeError);
}

TEST_CASE("gas_segment") {
  SUBCASE("constant signal") {
    const GasSequence g = GasSequence::Constant(20, 4, 0.3);
    const BoundarySet b = gas_segment(g);
    CHECK(b.interior().empty());
    CHECK(b.num_frames() == 20);
  }
  SUBCASE("single step") {
    GasSequence g = GasSequence::Constant(20, 4, 0.3);
    g.bottomRows(12).setConstant(0.8);  // rows 8.. differ
    const BoundarySet b = gas_segment(g);
    CHECK(b.interior() == std::vector<int>{8});
  }
  SUBCASE("two close peaks") {
    GasSequence g = GasSequence::Constant(20, 1, 0.5);
    // Mean jumps +0.2 at row 6 and +0.3 at row 8.
    g.bottomRows(14).array() += 0.2;
    g.bottomRows(12).array() += 0.3;
    GasSegmentOptions opt;
    opt.min_gap = 4;
    CHECK(gas_segment(g, opt).interior() == std::vector<int>{8});
    opt.min_gap = 2;
    CHECK(gas_segment(g, opt).interior() == std::vector<int>{6, 8});
  }
  SUBCASE("output strictly increasing within range") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
      Matrix m(30, 3);
      fill_uniform(m, 0.4, rng);
      const GasSequence g = (m.array() + 0.5).matrix();
      const auto in = gas_segment(g).interior();
      for (std::size_t i = 0; i < in.size(); ++i) {
        CHECK(in[i] >= 1);
        CHECK(in[i] < 30);
        if (i > 0) CHECK(in[i] > in[i - 1]);
      }
    }
  }
}

TEST_CASE("trained GAS changes faster at word boundaries") {
  SynthConfig sc;
  sc.train_utterances = 80;
  sc.test_utterances = 20;
  sc.seed = 11;
  const SynthCorpus corpus = generate_corpus(sc);
  GasConfig gc;
  gc.hidden_dim = 24;
  gc.epochs = 15;
  gc.learning_rate = 3e-3;
  gc.seed = 2;
  const GasModel m = train_gas_autoencoder(features_of(corpus.train), gc).model;
  std::vector<double> at_boundary, within;
  for (const auto& u : corpus.test) {
    const GasSequence g = extract_gas(m, u.features);
    const auto ends = u.boundaries.interior();
    for (int t = 1; t < g.rows(); ++t) {
      const double diff = (g.row(t) - g.row(t - 1)).norm();
      // Row t is the first frame after the segment ending at frame t.
      if (std::find(ends.begin(), ends.end(), t) != ends.end())
        at_boundary.push_back(diff);
      else
        within.push_back(diff);
    }
  }
  MESSAGE("median diff at boundaries " << median(at_boundary) << ", within "
                                       << median(within));
  CHECK(median(at_boundary) > median(within));
}
