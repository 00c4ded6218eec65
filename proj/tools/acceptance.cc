// tools/acceptance.cc

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

// Acceptance suite: one PASS/FAIL line per criterion, details indented below.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "cli.h"
#include "segaw/core/optim.h"
#include "segaw/eval/metrics.h"
#include "segaw/io/binary.h"
#include "segaw/match/matching.h"
#include "segaw/model/ssae.h"
#include "segaw/pipeline/experiment.h"
#include "segaw/pipeline/gradcheck.h"
#include "segaw/synth/corpus.h"
#include "segaw/train/trainer.h"

using namespace segaw;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string num(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

double cpu_seconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RowMatrix random_rows(int n, int d, Rng& rng) {
  Matrix m(n, d);
  fill_uniform(m, 1.0, rng);
  return m;
}

template <class P>
void scramble(P& p, Rng& rng, double scale) {
  visit_params(p, "", [&](const std::string&, Matrix& m) { fill_uniform(m, scale, rng); });
}

SsaeDims tiny_dims(int gate_layers) {
  SsaeDims d;
  d.feature_dim = 3;
  d.gas_dim = 2;
  d.encoder_hidden = 4;
  d.decoder_hidden = 3;
  d.gate_hidden = 4;
  d.gate_layers = gate_layers;
  return d;
}

// 1. Gradient integrity.
Outcome gradient_integrity() {
  Outcome o;
  const double start = cpu_seconds();
  for (std::uint64_t seed : {1, 2, 3})
    for (const auto& g : run_gradchecks(seed))
      o.require(g.report.max_relative_error < 1e-4,
                g.name + " seed " + std::to_string(seed) + ": max relative error " +
                    num(g.report.max_relative_error, 3) + " over " +
                    std::to_string(g.report.coordinates_checked) + " coordinates");
  const double elapsed = cpu_seconds() - start;
  o.require(elapsed < 120.0, "cpu time " + num(elapsed, 3) + " s < 120 s");
  return o;
}

// 2. Reset isolation.
Outcome reset_isolation() {
  Outcome o;
  Rng rng(21);
  bool encoder_ok = true, decoder_ok = true;
  int cases = 0;
  for (int trial = 0; trial < 50; ++trial) {
    SsaeParams p = SsaeParams::initialized(tiny_dims(1), rng);
    scramble(p, rng, 0.7);
    const int T = std::uniform_int_distribution<int>(2, 10)(rng);
    FeatureMatrix f;
    f.frames = random_rows(T, 3, rng);
    std::vector<int> interior;
    for (int t = 1; t < T; ++t)
      if (std::bernoulli_distribution(0.4)(rng)) interior.push_back(t);
    const BoundarySet b = BoundarySet::from_interior(interior, T);
    const EmbeddingSequence y = encode_segments(p, f, b);
    // Each embedding equals the segment encoded on its own, bit for bit.
    for (int s = 0; s < b.num_segments(); ++s) {
      const Segment seg = b.segment(s);
      FeatureMatrix alone;
      alone.frames = f.frames.middleRows(seg.begin, seg.length());
      const EmbeddingSequence e = encode_segments(p, alone, BoundarySet::whole(seg.length()));
      encoder_ok = encoder_ok && e.vectors.row(0) == y.vectors.row(s);
    }
    // Decoder: the loss of segment n has exactly zero gradient w.r.t. any
    // other segment's embedding, free-running and teacher-forced.
    std::vector<SegmentView> views;
    for (const Segment& s : b.segments()) views.push_back({&f.frames, s});
    const Matrix emb = y.vectors.transpose();
    for (bool tf : {false, true})
      for (int n = 0; n < b.num_segments(); ++n) {
        DecoderBatch dec(p.autoencoder.decoder, emb, views, DecoderOptions{tf});
        std::vector<double> w(static_cast<std::size_t>(b.num_segments()), 0.0);
        w[static_cast<std::size_t>(n)] = 1.0;
        DecoderParams g = zeros_like(p.autoencoder.decoder);
        const Matrix d_emb = dec.backward(g, w);
        for (int m = 0; m < b.num_segments(); ++m)
          if (m != n) decoder_ok = decoder_ok && d_emb.col(m).isZero(0.0);
        ++cases;
      }
  }
  o.require(encoder_ok, "encoder embeddings equal isolated segment encodings bit for bit (50 utterances)");
  o.require(decoder_ok, "decoder cross-segment embedding gradients exactly zero (" + std::to_string(cases) + " cases)");
  return o;
}

// 3. Policy-gradient oracle.
Outcome policy_gradient_oracle() {
  Outcome o;
  double worst = 0.0;
  for (int T = 1; T <= 4; ++T)
    for (std::uint64_t seed : {31, 32}) {
      const SsaeDims dims = tiny_dims(1 + static_cast<int>(seed % 2));
      Rng rng(seed * 10 + static_cast<std::uint64_t>(T));
      SsaeParams params = SsaeParams::initialized(dims, rng);
      scramble(params, rng, 0.7);
      FeatureMatrix f;
      f.frames = random_rows(T, dims.feature_dim, rng);
      const RowMatrix gas = (random_rows(T, dims.gas_dim, rng).array() * 0.4 + 0.5).matrix();
      const TrainingExample ex{&f, &gas};
      const int K = 1 << T;
      std::vector<ActionSequence> seqs;
      std::vector<double> rewards;
      for (int bits = 0; bits < K; ++bits) {
        ActionSequence a(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) a[static_cast<std::size_t>(t)] = (bits >> t) & 1 ? Action::kSegment : Action::kPass;
        seqs.push_back(a);
        const BoundarySet b = actions_to_boundaries(a);
        const auto loss = segmentation_losses(params.autoencoder, std::span(&ex, 1), std::span(&b, 1));
        rewards.push_back(compute_reward(loss[0], b.num_segments(), T, 0.5).r);
      }
      auto prob = [&](const ActionSequence& a) {
        const PolicyOutput pi = gate_forward(params, f, gas, a);
        double p = 1.0;
        for (int t = 0; t < T; ++t) p *= pi.probs(t, a[static_cast<std::size_t>(t)] == Action::kSegment ? 0 : 1);
        return p;
      };
      // E[(r - b) ∇ log π] with a constant baseline, summed over all sequences.
      const double baseline = -0.9;
      std::vector<GateEpisode> eps(static_cast<std::size_t>(K), GateEpisode{&f.frames, &gas});
      GateBatch run(params.gate, eps);
      run.run_given(seqs);
      std::vector<double> weights;
      for (int k = 0; k < K; ++k) weights.push_back(-prob(seqs[k]) * (rewards[k] - baseline));
      GateParams grad = zeros_like(params.gate);
      accumulate_log_policy_gradient(run, weights, grad);
      auto expected_reward = [&] {
        double J = 0.0;
        for (int k = 0; k < K; ++k) J += prob(seqs[k]) * rewards[k];
        return J;
      };
      const GradCheckReport r =
          finite_diff_check(expected_reward, param_list(params.gate), param_list(grad));
      worst = std::max(worst, r.max_relative_error);
    }
  o.require(worst < 1e-4, "exhaustive REINFORCE expectation vs finite differences of J, T = 1..4: max relative error " + num(worst, 3));

  Rng rng(33);
  std::uniform_real_distribution<double> u(-600.0, 0.0);
  bool zero = true;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> r(static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 8)(rng)));
    for (auto& v : r) v = u(rng);
    double s = 0.0;
    for (double a : compute_advantages(r)) s += a;
    zero = zero && s == 0.0;
  }
  o.require(zero, "baseline advantages sum to exactly zero (10000 reward sets)");
  return o;
}

// 4. Matching oracles.
double clamped_cos(const RowMatrix& a, int i, const RowMatrix& b, int j) {
  const double na = a.row(i).norm(), nb = b.row(j).norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.row(i).dot(b.row(j)) / (na * nb), 0.0, 1.0);
}

struct PathCost {
  double cost;
  int length;
};

// All monotone alignments from any (0, j) to any (Nq-1, j'); lexicographic
// minimum of (cost, length).
PathCost exhaustive_alignment(const RowMatrix& q, const RowMatrix& d) {
  PathCost best{std::numeric_limits<double>::infinity(), 0};
  const int nq = static_cast<int>(q.rows()), nd = static_cast<int>(d.rows());
  std::function<void(int, int, double, int)> walk = [&](int i, int j, double cost, int len) {
    cost += 1.0 - clamped_cos(q, i, d, j);
    ++len;
    if (i == nq - 1 && (cost < best.cost || (cost == best.cost && len < best.length))) best = {cost, len};
    if (i + 1 < nq) walk(i + 1, j, cost, len);
    if (j + 1 < nd) walk(i, j + 1, cost, len);
    if (i + 1 < nq && j + 1 < nd) walk(i + 1, j + 1, cost, len);
  };
  for (int j = 0; j < nd; ++j) walk(0, j, 0.0, 0);
  return best;
}

Outcome matching_oracles() {
  Outcome o;
  Rng rng(41);
  double worst_sub = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int nd = std::uniform_int_distribution<int>(1, 15)(rng);
    const int nq = std::uniform_int_distribution<int>(1, nd)(rng);
    const int dim = std::uniform_int_distribution<int>(1, 5)(rng);
    EmbeddingSequence q{random_rows(nq, dim, rng)}, d{random_rows(nd, dim, rng)};
    double best = 0.0;
    for (int n = 0; n + nq <= nd; ++n) {
      double s = 1.0;
      for (int m = 0; m < nq; ++m) s *= clamped_cos(q.vectors, m, d.vectors, n + m);
      best = std::max(best, s);
    }
    worst_sub = std::max(worst_sub, std::abs(subsequence_score(q, d).score - best));
  }
  o.require(worst_sub < 1e-9, "subsequence_score vs brute-force window products, 1000 instances: max error " + num(worst_sub, 3));

  double worst_dtw = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = std::uniform_int_distribution<int>(1, 4)(rng);
    const RowMatrix q = random_rows(std::uniform_int_distribution<int>(1, 8)(rng), dim, rng);
    const RowMatrix d = random_rows(std::uniform_int_distribution<int>(1, 8)(rng), dim, rng);
    const PathCost best = exhaustive_alignment(q, d);
    worst_dtw = std::max(worst_dtw, std::abs(dtw_score(q, d) - (1.0 - best.cost / best.length)));
  }
  o.require(worst_dtw < 1e-9, "dtw_score vs exhaustive alignment, 200 instances with T <= 8: max error " + num(worst_dtw, 3));
  return o;
}

// 5. Metric oracles.
Outcome metric_oracles() {
  Outcome o;
  const PrfReport r = segmentation_prf(BoundarySet::from_interior({10, 20, 30}, 60),
                                       BoundarySet::from_interior({12, 25, 50}, 60), 4);
  o.require(std::abs(r.precision - 1.0 / 3) < 1e-15 && std::abs(r.recall - 1.0 / 3) < 1e-15 &&
                std::abs(r.f1 - 1.0 / 3) < 1e-15,
            "hyp {10,20,30} vs ref {12,25,50}, tolerance 4: P " + num(r.precision) + " R " +
                num(r.recall) + " F1 " + num(r.f1));
  const MapReport m = mean_average_precision({{"a", "x", "b", "y"}}, {{"a", "b"}});
  o.require(m.map == (1.0 + 2.0 / 3.0) / 2.0, "relevant at ranks 1 and 3: AP " + num(m.map, 6));
  return o;
}

// 6. Desk-scale reproduction.
double spearman(const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  std::vector<double> rank(n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && y[idx[j + 1]] == y[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
    i = j + 1;
  }
  std::vector<double> x(n);
  std::iota(x.begin(), x.end(), 1.0);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(rank.begin(), rank.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (rank[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (rank[i] - my) * (rank[i] - my);
  }
  return syy == 0.0 ? 0.0 : sxy / std::sqrt(sxx * syy);
}

Outcome desk_reproduction(const std::vector<std::uint64_t>& seeds, bool verbose) {
  Outcome o;
  const double start = cpu_seconds();
  std::vector<double> nt_err, rho, f1_gain_random, f1_gain_gas, map_ratio, oracle_gain, dtw_gain;
  for (std::uint64_t seed : seeds) {
    const ExperimentConfig config = desk_experiment_config(seed);
    const ExperimentResult r = run_experiment(config, [&](const std::string& s) {
      if (verbose) std::cerr << "[seed " << seed << "] " << s << '\n';
    });
    std::vector<double> f1;
    for (const auto& it : r.iterations) f1.push_back(it.prf.f1);
    const double nt = r.iterations.back().sampled_nt;
    nt_err.push_back(std::abs(nt / r.word_rate - 1.0));
    rho.push_back(spearman(f1));
    f1_gain_random.push_back(r.ssae_prf.f1 - r.random_prf.f1);
    f1_gain_gas.push_back(r.ssae_prf.f1 - r.gas_prf.f1);
    map_ratio.push_back(r.map_random > 0 ? r.map_ssae / r.map_random : 0.0);
    oracle_gain.push_back(r.map_oracle - r.map_ssae);
    dtw_gain.push_back(r.map_ssae - r.map_dtw);
    std::string curve;
    for (double v : f1) curve += (curve.empty() ? "" : " ") + num(v, 3);
    o.note("seed " + std::to_string(seed) + ": word rate " + num(r.word_rate) + ", final N/T " + num(nt) +
           " (greedy " + num(r.iterations.back().greedy_nt) + "), F1 by iteration [" + curve + "]");
    o.note("seed " + std::to_string(seed) + ": F1 ssae " + num(r.ssae_prf.f1) + " gas " + num(r.gas_prf.f1) +
           " random " + num(r.random_prf.f1) + "; MAP ssae " + num(r.map_ssae) + " oracle " +
           num(r.map_oracle) + " dtw " + num(r.map_dtw) + " random " + num(r.map_random));
  }
  o.require(median(nt_err) <= 0.3, "6a median |N/T / word rate - 1| = " + num(median(nt_err)) + " <= 0.3");
  o.require(median(rho) > 0.8, "6a median Spearman(iteration, F1) = " + num(median(rho)) + " > 0.8");
  o.require(median(f1_gain_random) >= 0.25, "6b median F1(ssae) - F1(random) = " + num(median(f1_gain_random)) + " >= 0.25");
  o.require(median(f1_gain_gas) >= 0.0, "6b median F1(ssae) - F1(gas) = " + num(median(f1_gain_gas)) + " >= 0");
  o.require(median(map_ratio) >= 3.0, "6c median MAP(ssae) / MAP(random) = " + num(median(map_ratio)) + " >= 3");
  o.require(median(oracle_gain) >= 0.0, "6c median MAP(oracle) - MAP(ssae) = " + num(median(oracle_gain)) + " >= 0");
  o.require(median(dtw_gain) >= 0.0, "6c median MAP(ssae) - MAP(dtw) = " + num(median(dtw_gain)) + " >= 0");
  const double elapsed = cpu_seconds() - start;
  o.require(elapsed < 1800.0, "cpu time " + num(elapsed, 4) + " s < 1800 s");
  return o;
}

// 7. Phase-1 convergence.
Outcome phase1_convergence() {
  Outcome o;
  auto run = [] {
    SynthConfig sc;
    sc.train_utterances = 5;
    sc.test_utterances = 0;
    sc.seed = 71;
    const SynthCorpus synth = generate_corpus(sc);
    SsaeDims dims;
    dims.feature_dim = sc.dim;
    dims.gas_dim = 4;
    dims.encoder_hidden = dims.decoder_hidden = 16;
    dims.gate_hidden = 8;
    dims.gate_layers = 1;
    Rng rng(72);
    std::vector<RowMatrix> gas;
    for (const auto& u : synth.train)
      gas.push_back((random_rows(u.features.num_frames(), dims.gas_dim, rng).array() * 0.4 + 0.5).matrix());
    std::vector<TrainingExample> corpus;
    for (std::size_t i = 0; i < gas.size(); ++i) corpus.push_back({&synth.train[i].features, &gas[i]});
    SsaeParams params = SsaeParams::initialized(dims, rng);
    TrainConfig c;
    c.batch_size = 1;
    AdamState state(param_list(params.autoencoder), AdamConfig{c.autoencoder_lr});
    Rng r(73);
    return train_phase1(params, corpus, c, 200, state, r).loss_curve;
  };
  const auto a = run();
  const auto b = run();
  const auto halved = std::find_if(a.begin(), a.end(), [&](double v) { return v <= 0.5 * a.front(); });
  o.require(halved != a.end(), "loss " + num(a.front()) + " at epoch 1 reaches " + num(a.back()) +
                                   " at epoch 200; first halved at epoch " +
                                   (halved == a.end() ? std::string("never") : std::to_string(halved - a.begin() + 1)));
  o.require(a == b, "loss curves of two runs are bit-identical");
  return o;
}

// 8. Determinism of the command-line pipeline.
Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "segaw_acceptance_determinism";
  fs::remove_all(root);
  const std::string config =
      "outer_iterations = 2\nphase1_epochs = 2\nphase2_epochs = 1\nencoder_hidden = 8\n"
      "decoder_hidden = 8\ngate_hidden = 8\ngate_layers = 1\nlambda = 500\nbatch_size = 8\n";
  std::vector<std::string> search_out;
  bool ok = true;
  for (const char* name : {"a", "b"}) {
    const fs::path d = root / name;
    fs::create_directories(d);
    atomic_write_file((d / "train.conf").string(), config);
    auto p = [&](const std::string& f) { return (d / f).string(); };
    std::ostringstream out, err;
    const std::vector<std::vector<std::string>> steps = {
        {"synth", "--seed", "81", "--out", p("corpus"), "--train-utterances", "40", "--test-utterances", "10"},
        {"train-gas", "--seed", "82", "--manifest", p("corpus/train.manifest"), "--out", p("gas.ck"), "--gas-dim", "8", "--epochs", "2"},
        {"train", "--seed", "83", "--manifest", p("corpus/train.manifest"), "--gas", p("gas.ck"), "--out", p("ssae.ck"), "--config", p("train.conf")},
        {"embed", "--model", p("ssae.ck"), "--manifest", p("corpus/test.manifest"), "--out", p("index")},
        {"search", "--model", p("ssae.ck"), "--index", p("index"), "--query", p("corpus/train0003.feat"), "--out", p("ranking.tsv")},
    };
    for (const auto& s : steps) ok = ok && run_cli(s, out, err) == 0;
    if (!ok) o.note("pipeline failed: " + err.str());
  }
  o.require(ok, "synth, train-gas, train, embed and search ran twice");
  if (ok)
    for (const char* f : {"gas.ck", "ssae.ck", "index", "ranking.tsv", "corpus/train.manifest", "corpus/train0000.feat"}) {
      const bool same = read_file((root / "a" / f).string()) == read_file((root / "b" / f).string());
      o.require(same, std::string(f) + " bit-identical across runs");
    }
  fs::remove_all(root);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::vector<int> only;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  bool verbose = false;
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--seeds", seeds, "Seeds of the desk-scale reproduction")->delimiter(',');
  app.add_flag("--verbose", verbose, "Progress of the desk-scale reproduction on stderr");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient integrity", gradient_integrity},
      {"reset isolation", reset_isolation},
      {"policy-gradient oracle", policy_gradient_oracle},
      {"matching oracles", matching_oracles},
      {"metric oracles", metric_oracles},
      {"desk-scale reproduction", [&] { return desk_reproduction(seeds, verbose); }},
      {"phase-1 convergence", phase1_convergence},
      {"determinism", determinism},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto wall = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall).count();
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first
              << " (" << num(secs, 3) << " s)\n";
    for (const auto& d : o.details) std::cout << "    " << d << '\n';
    std::cout << std::flush;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
