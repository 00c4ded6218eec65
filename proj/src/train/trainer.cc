// src/train/trainer.cc

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

#include "segaw/train/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "json.hpp"

namespace segaw {

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("train: " + what); };
  if (!(lambda > 0.0)) fail("lambda must be > 0");
  if (samples < 2) fail("samples must be >= 2");
  if (!(autoencoder_lr > 0.0) || !(gate_lr > 0.0)) fail("learning rates must be > 0");
  if (outer_iterations < 0 || phase1_epochs < 0 || phase2_epochs < 0)
    fail("iteration and epoch counts must be >= 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(ppo_epsilon > 0.0 && ppo_epsilon < 1.0)) fail("ppo_epsilon must be in (0, 1)");
  if (ppo_epochs < 1) fail("ppo_epochs must be >= 1");
  if (!(clip_norm > 0.0)) fail("clip_norm must be > 0");
}

RewardRecord compute_reward(double recon_error, int num_segments, int num_frames,
                            double lambda) {
  if (num_frames < 1 || num_segments < 1)
    throw DomainError("compute_reward: need T >= 1 and N >= 1");
  RewardRecord r;
  r.r_mse = -recon_error;
  r.r_nt = -static_cast<double>(num_segments) / num_frames;
  r.r = std::min(r.r_mse, lambda * r.r_nt);
  return r;
}

double compute_baseline(std::span<const double> rewards) {
  if (rewards.empty()) throw DomainError("compute_baseline: no rewards");
  return std::accumulate(rewards.begin(), rewards.end(), 0.0) /
         static_cast<double>(rewards.size());
}

std::vector<double> compute_advantages(std::span<const double> rewards) {
  const double r_b = compute_baseline(rewards);
  std::vector<double> out;
  double partial = 0.0;
  for (std::size_t m = 0; m + 1 < rewards.size(); ++m) {
    out.push_back(rewards[m] - r_b);
    partial += out.back();
  }
  // The last entry cancels the running sum so the advantages sum to exactly
  // zero in floating point; it differs from r - r_b by a few ulps at most.
  out.push_back(-partial);
  return out;
}

void accumulate_log_policy_gradient(GateBatch& run, std::span<const double> weights,
                                    GateParams& grads) {
  const auto& probs = run.probs();
  const auto& actions = run.actions();
  if (weights.size() != probs.size())
    throw ShapeError("accumulate_log_policy_gradient: one weight per episode required");
  std::vector<Matrix> d_logits(probs.size());
  for (std::size_t e = 0; e < probs.size(); ++e) {
    Matrix d = probs[e];
    for (Eigen::Index t = 0; t < d.rows(); ++t)
      d(t, actions[e][t] == Action::kSegment ? 0 : 1) -= 1.0;
    d_logits[e] = weights[e] * d;
  }
  run.backward(d_logits, grads);
}

void accumulate_ppo_gradient(GateBatch& run, std::span<const double> advantages,
                             const std::vector<Vector>& old_log_probs,
                             double epsilon, GateParams& grads) {
  const auto& probs = run.probs();
  const auto& actions = run.actions();
  if (advantages.size() != probs.size() || old_log_probs.size() != probs.size())
    throw ShapeError("accumulate_ppo_gradient: one entry per episode required");
  std::vector<Matrix> d_logits(probs.size());
  for (std::size_t e = 0; e < probs.size(); ++e) {
    const double A = advantages[e];
    const Vector logp = run.log_probs(static_cast<int>(e));
    Matrix d = Matrix::Zero(probs[e].rows(), 2);
    for (Eigen::Index t = 0; t < d.rows(); ++t) {
      const double ratio = std::exp(logp(t) - old_log_probs[e](t));
      const bool active = (A > 0.0 && ratio < 1.0 + epsilon) ||
                          (A < 0.0 && ratio > 1.0 - epsilon);
      if (!active) continue;
      const int a = actions[e][t] == Action::kSegment ? 0 : 1;
      d.row(t) = A * ratio * probs[e].row(t);
      d(t, a) -= A * ratio;
    }
    d_logits[e] = std::move(d);
  }
  run.backward(d_logits, grads);
}

namespace {

double frames_of(std::span<const TrainingExample> examples) {
  double n = 0.0;
  for (const auto& ex : examples) n += ex.features->num_frames();
  return n;
}

std::vector<SegmentView> views_of(std::span<const TrainingExample> examples,
                                  std::span<const BoundarySet> boundaries,
                                  std::vector<int>* owner = nullptr) {
  std::vector<SegmentView> views;
  for (std::size_t i = 0; i < examples.size(); ++i)
    for (const Segment& s : boundaries[i].segments()) {
      views.push_back({&examples[i].features->frames, s});
      if (owner) owner->push_back(static_cast<int>(i));
    }
  return views;
}

std::vector<GateEpisode> episodes_of(std::span<const TrainingExample> examples) {
  std::vector<GateEpisode> eps;
  for (const auto& ex : examples) {
    if (ex.features == nullptr || ex.gas == nullptr)
      throw InputError("training example without features or GAS");
    eps.push_back({&ex.features->frames, ex.gas});
  }
  return eps;
}

void check_corpus(std::span<const TrainingExample> corpus) {
  if (corpus.empty()) throw InputError("training corpus is empty");
  for (const auto& ex : corpus) {
    if (ex.features == nullptr || ex.gas == nullptr)
      throw InputError("training example without features or GAS");
    if (ex.features->num_frames() < 1)
      throw InputError("empty utterance " + ex.features->id);
    if (ex.gas->rows() != ex.features->num_frames())
      throw ShapeError("GAS rows differ from frame count for " + ex.features->id);
  }
}

void zero(const ParamList& list) {
  for (const auto& p : list) p.value->setZero();
}

// One clipped Adam step on mean per-frame autoencoder loss.
double autoencoder_batch_step(AutoencoderParams& params, AutoencoderParams& grads,
                              std::span<const TrainingExample> batch,
                              std::span<const BoundarySet> boundaries,
                              const TrainConfig& config, AdamState& state) {
  const std::vector<SegmentView> views = views_of(batch, boundaries);
  DecoderOptions options;
  options.teacher_forcing = config.teacher_forcing;
  const ParamList plist = param_list(params);
  const ParamList glist = param_list(grads);
  zero(glist);
  const AutoencoderResult res = autoencoder_loss(params, views, options, &grads);
  if (!std::isfinite(res.loss)) throw TrainingError("phase 1: non-finite loss");
  const double frames = frames_of(batch);
  for (const auto& g : glist) *g.value /= frames;
  clip_global_norm(glist, config.clip_norm);
  adam_update(plist, glist, state);
  return res.loss;
}

template <class SegmentBatch>
Phase1Result run_phase1(AutoencoderParams& params,
                        std::span<const TrainingExample> corpus,
                        const TrainConfig& config, int epochs, AdamState& state,
                        Rng& rng, SegmentBatch&& segment_batch) {
  AutoencoderParams grads = zeros_like(params);
  Phase1Result result;
  std::vector<int> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t bs = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      std::vector<int> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                           order.begin() + static_cast<std::ptrdiff_t>(end));
      std::vector<TrainingExample> batch;
      for (int i : idx) batch.push_back(corpus[static_cast<std::size_t>(i)]);
      const std::vector<BoundarySet> bounds = segment_batch(idx, batch);
      total += autoencoder_batch_step(params, grads, batch, bounds, config, state);
    }
    result.loss_curve.push_back(total);
  }
  return result;
}

}  // namespace

std::vector<double> segmentation_losses(const AutoencoderParams& params,
                                        std::span<const TrainingExample> examples,
                                        std::span<const BoundarySet> boundaries,
                                        const DecoderOptions& options) {
  if (examples.size() != boundaries.size())
    throw ShapeError("segmentation_losses: one boundary set per example required");
  std::vector<int> owner;
  const std::vector<SegmentView> views = views_of(examples, boundaries, &owner);
  const AutoencoderResult res = autoencoder_loss(params, views, options, nullptr);
  std::vector<double> out(examples.size(), 0.0);
  for (std::size_t s = 0; s < views.size(); ++s)
    out[static_cast<std::size_t>(owner[s])] += res.segment_losses[s];
  return out;
}

PolicyStepStats policy_update(GateParams& gate, std::span<const GateEpisode> utterances,
                              const RewardFunction& reward, const TrainConfig& config,
                              AdamState& gate_state, Rng& rng) {
  config.validate();
  const int U = static_cast<int>(utterances.size());
  const int M = config.samples;
  if (U == 0) throw InputError("policy_update: empty batch");
  std::vector<GateEpisode> episodes;
  for (const auto& ep : utterances)
    for (int m = 0; m < M; ++m) episodes.push_back(ep);

  GateBatch sampled(gate, episodes);
  sampled.run_decide(DecodeMode::kSample, &rng);
  const std::vector<ActionSequence> actions = sampled.actions();
  std::vector<RewardRecord> records = reward(actions);
  if (records.size() != episodes.size())
    throw ShapeError("policy_update: one reward per sampled sequence required");

  PolicyStepStats stats;
  std::vector<double> advantages;
  const double scale = 1.0 / (static_cast<double>(U) * M);
  for (int u = 0; u < U; ++u) {
    std::vector<double> r;
    for (int m = 0; m < M; ++m) r.push_back(records[u * M + m].r);
    const double r_b = compute_baseline(r);
    const std::vector<double> adv = compute_advantages(r);
    for (int m = 0; m < M; ++m) {
      RewardRecord& rec = records[u * M + m];
      rec.r_b = r_b;
      rec.sample_rewards = r;
      advantages.push_back(adv[m] * scale);
      stats.mean_reward += rec.r * scale;
      stats.mean_r_mse += rec.r_mse * scale;
      stats.mean_r_nt += rec.r_nt * scale;
    }
  }
  stats.mean_nt = -stats.mean_r_nt;
  stats.rewards = std::move(records);

  GateParams grads = zeros_like(gate);
  const ParamList plist = param_list(gate);
  const ParamList glist = param_list(grads);
  auto apply = [&](bool first) {
    const double norm = clip_global_norm(glist, config.clip_norm);
    if (first) stats.grad_norm = norm;
    adam_update(plist, glist, gate_state);
  };

  if (config.mode == PolicyMode::kReinforce) {
    accumulate_log_policy_gradient(sampled, advantages, grads);
    apply(true);
    return stats;
  }
  std::vector<Vector> old_log_probs;
  for (std::size_t e = 0; e < episodes.size(); ++e)
    old_log_probs.push_back(sampled.log_probs(static_cast<int>(e)));
  accumulate_ppo_gradient(sampled, advantages, old_log_probs, config.ppo_epsilon, grads);
  apply(true);
  for (int k = 1; k < config.ppo_epochs; ++k) {
    zero(glist);
    GateBatch run(gate, episodes);
    run.run_given(actions);
    accumulate_ppo_gradient(run, advantages, old_log_probs, config.ppo_epsilon, grads);
    apply(false);
  }
  return stats;
}

PolicyStepStats policy_gradient_step(SsaeParams& params,
                                     std::span<const TrainingExample> batch,
                                     const TrainConfig& config,
                                     AdamState& gate_state, Rng& rng) {
  check_corpus(batch);
  const int M = config.samples;
  std::vector<TrainingExample> expanded;
  for (const auto& ex : batch)
    for (int m = 0; m < M; ++m) expanded.push_back(ex);
  DecoderOptions options;
  options.teacher_forcing = config.teacher_forcing;
  const RewardFunction reward = [&](const std::vector<ActionSequence>& actions) {
    std::vector<BoundarySet> bounds;
    for (const auto& a : actions) bounds.push_back(actions_to_boundaries(a));
    const std::vector<double> losses =
        segmentation_losses(params.autoencoder, expanded, bounds, options);
    std::vector<RewardRecord> out;
    for (std::size_t e = 0; e < bounds.size(); ++e)
      out.push_back(compute_reward(losses[e], bounds[e].num_segments(),
                                   bounds[e].num_frames(), config.lambda));
    return out;
  };
  const std::vector<GateEpisode> episodes = episodes_of(batch);
  return policy_update(params.gate, episodes, reward, config, gate_state, rng);
}

Phase1Result train_phase1(SsaeParams& params, std::span<const TrainingExample> corpus,
                          const TrainConfig& config, int epochs, AdamState& state,
                          Rng& rng) {
  config.validate();
  check_corpus(corpus);
  const DecodeMode mode = config.phase1_segmentation == Phase1Segmentation::kGreedy
                              ? DecodeMode::kGreedy
                              : DecodeMode::kSample;
  return run_phase1(params.autoencoder, corpus, config, epochs, state, rng,
                    [&](const std::vector<int>&, std::span<const TrainingExample> batch) {
                      const std::vector<GateEpisode> eps = episodes_of(batch);
                      GateBatch run(params.gate, eps);
                      run.run_decide(mode, &rng);
                      std::vector<BoundarySet> out;
                      for (const auto& a : run.actions())
                        out.push_back(actions_to_boundaries(a));
                      return out;
                    });
}

Phase1Result train_autoencoder_fixed(AutoencoderParams& params,
                                     std::span<const TrainingExample> corpus,
                                     std::span<const BoundarySet> boundaries,
                                     const TrainConfig& config, int epochs,
                                     AdamState& state, Rng& rng) {
  config.validate();
  if (corpus.empty()) throw InputError("training corpus is empty");
  if (boundaries.size() != corpus.size())
    throw ShapeError("train_autoencoder_fixed: one boundary set per utterance required");
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (boundaries[i].num_frames() != corpus[i].features->num_frames())
      throw ShapeError("boundaries do not cover utterance " + corpus[i].features->id);
  return run_phase1(params, corpus, config, epochs, state, rng,
                    [&](const std::vector<int>& idx, std::span<const TrainingExample>) {
                      std::vector<BoundarySet> out;
                      for (int i : idx) out.push_back(boundaries[static_cast<std::size_t>(i)]);
                      return out;
                    });
}

std::uint64_t autoencoder_init_seed(std::uint64_t seed, int iteration) {
  return derive_seed(derive_seed(seed, "autoencoder"), static_cast<std::uint64_t>(iteration));
}

namespace {

void log_line(std::ostream* out, const nlohmann::json& j) {
  if (out) *out << j.dump() << '\n' << std::flush;
}

}  // namespace

TrainResult train_iterative(std::span<const TrainingExample> corpus,
                            const SsaeDims& dims, const TrainConfig& config,
                            const TrainObserver& observer, std::ostream* metrics_log) {
  config.validate();
  check_corpus(corpus);
  for (const auto& ex : corpus) {
    if (ex.features->dim() != dims.feature_dim)
      throw ShapeError("feature dim of " + ex.features->id + " differs from the model");
    if (ex.gas->cols() != dims.gas_dim)
      throw ShapeError("GAS dim of " + ex.features->id + " differs from the model");
  }

  TrainResult result;
  result.params.dims = dims;
  Rng gate_rng(derive_seed(config.seed, "gate"));
  result.params.gate = GateParams::initialized(dims, gate_rng);
  Rng rng(derive_seed(config.seed, "train"));
  AdamConfig gate_adam;
  gate_adam.learning_rate = config.gate_lr;
  AdamState gate_state(param_list(result.params.gate), gate_adam);
  AdamConfig ae_adam;
  ae_adam.learning_rate = config.autoencoder_lr;

  auto phase1 = [&](int iteration) {
    Rng init(autoencoder_init_seed(config.seed, iteration));
    result.params.autoencoder = AutoencoderParams::initialized(dims, init);
    if (observer.on_phase1_start) observer.on_phase1_start(iteration, result.params);
    AdamState state(param_list(result.params.autoencoder), ae_adam);
    const Phase1Result p1 =
        train_phase1(result.params, corpus, config, config.phase1_epochs, state, rng);
    const double last = p1.loss_curve.empty() ? 0.0 : p1.loss_curve.back();
    log_line(metrics_log, {{"iteration", iteration}, {"phase", 1}, {"loss", last}});
    return last;
  };

  std::vector<int> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t bs = static_cast<std::size_t>(config.batch_size);
  for (int it = 1; it <= config.outer_iterations; ++it) {
    IterationMetrics m;
    m.iteration = it;
    m.phase1_loss = phase1(it);
    for (int epoch = 0; epoch < config.phase2_epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      IterationMetrics acc;
      for (std::size_t start = 0; start < order.size(); start += bs) {
        const std::size_t end = std::min(order.size(), start + bs);
        std::vector<TrainingExample> batch;
        for (std::size_t i = start; i < end; ++i)
          batch.push_back(corpus[static_cast<std::size_t>(order[i])]);
        const PolicyStepStats s =
            policy_gradient_step(result.params, batch, config, gate_state, rng);
        const double w = static_cast<double>(batch.size()) / static_cast<double>(order.size());
        acc.mean_reward += w * s.mean_reward;
        acc.mean_r_mse += w * s.mean_r_mse;
        acc.mean_r_nt += w * s.mean_r_nt;
        acc.mean_nt += w * s.mean_nt;
      }
      m.mean_reward = acc.mean_reward;
      m.mean_r_mse = acc.mean_r_mse;
      m.mean_r_nt = acc.mean_r_nt;
      m.mean_nt = acc.mean_nt;
    }
    log_line(metrics_log, {{"iteration", it},
                           {"phase", 2},
                           {"mean_r", m.mean_reward},
                           {"mean_r_mse", m.mean_r_mse},
                           {"mean_r_nt", m.mean_r_nt},
                           {"mean_nt", m.mean_nt}});
    result.metrics.push_back(m);
    if (observer.on_iteration_end) observer.on_iteration_end(m, result.params);
  }
  if (config.final_phase1) phase1(config.outer_iterations + 1);
  return result;
}

}  // namespace segaw
