// include/segaw/train/trainer.h

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
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "segaw/core/optim.h"
#include "segaw/model/ssae.h"

namespace segaw {

enum class PolicyMode { kReinforce, kPpo };

// How phase 1 obtains segmentations from the frozen gate.
enum class Phase1Segmentation { kSample, kGreedy };

struct TrainConfig {
  double lambda = 5.0;
  int samples = 5;  // M segmentations per utterance in phase 2
  double autoencoder_lr = 1e-3;
  double gate_lr = 3e-4;
  int outer_iterations = 5;
  int phase1_epochs = 10;
  int phase2_epochs = 2;
  int batch_size = 16;
  PolicyMode mode = PolicyMode::kPpo;
  double ppo_epsilon = 0.2;
  int ppo_epochs = 4;
  double clip_norm = 5.0;
  bool teacher_forcing = false;
  Phase1Segmentation phase1_segmentation = Phase1Segmentation::kSample;
  // Retrain a fresh autoencoder on the final gate after the last iteration, so
  // the returned encoder matches the returned segmentation policy.
  bool final_phase1 = true;
  std::uint64_t seed = 0;

  // Throws ConfigError when an invariant does not hold.
  void validate() const;
};

struct RewardRecord {
  double r_mse = 0.0;
  double r_nt = 0.0;
  double r = 0.0;
  double r_b = 0.0;
  std::vector<double> sample_rewards;
};

// r_mse = -recon_error, r_nt = -N/T, r = min(r_mse, lambda * r_nt).
RewardRecord compute_reward(double recon_error, int num_segments, int num_frames,
                            double lambda);

double compute_baseline(std::span<const double> rewards);

// r_m - r_b for every sample.  The last entry is adjusted by rounding error so
// the left-to-right sum is exactly zero.
std::vector<double> compute_advantages(std::span<const double> rewards);

// An utterance with its GAS, both owned elsewhere.
struct TrainingExample {
  const FeatureMatrix* features = nullptr;
  const RowMatrix* gas = nullptr;
};

// Accumulates into grads the gradient of -Σ_e w_e Σ_t log π_t(a_t) over the
// episodes of a gate run.
void accumulate_log_policy_gradient(GateBatch& run, std::span<const double> weights,
                                    GateParams& grads);

// Gradient of the clipped surrogate -Σ_e w_e Σ_t min(ρ A_e, clip(ρ, 1±ε) A_e)
// with ρ = π(a_t) / π_old(a_t).  Advantages may be pre-scaled by the batch
// size.  old_log_probs[e] holds log π_old(a_t) per frame.
void accumulate_ppo_gradient(GateBatch& run, std::span<const double> advantages,
                             const std::vector<Vector>& old_log_probs,
                             double epsilon, GateParams& grads);

struct PolicyStepStats {
  // One per sampled segmentation, utterance-major; r_b is the utterance
  // baseline and sample_rewards holds its M rewards.
  std::vector<RewardRecord> rewards;
  double mean_reward = 0.0;
  double mean_r_mse = 0.0;
  double mean_r_nt = 0.0;
  double mean_nt = 0.0;  // mean N/T over all sampled segmentations
  double grad_norm = 0.0;  // before clipping, first update
};

// Rewards for sampled action sequences, utterance-major with M per utterance.
using RewardFunction =
    std::function<std::vector<RewardRecord>(const std::vector<ActionSequence>&)>;

// Samples M action sequences per episode, scores them with reward and takes
// one REINFORCE step or ppo_epochs clipped-surrogate steps on the gate.
PolicyStepStats policy_update(GateParams& gate, std::span<const GateEpisode> episodes,
                              const RewardFunction& reward, const TrainConfig& config,
                              AdamState& gate_state, Rng& rng);

// policy_update with rewards from the frozen autoencoder.  Only gate
// parameters change.
PolicyStepStats policy_gradient_step(SsaeParams& params,
                                     std::span<const TrainingExample> batch,
                                     const TrainConfig& config,
                                     AdamState& gate_state, Rng& rng);

// Per-utterance sum of segment reconstruction losses for given segmentations.
std::vector<double> segmentation_losses(const AutoencoderParams& params,
                                        std::span<const TrainingExample> examples,
                                        std::span<const BoundarySet> boundaries,
                                        const DecoderOptions& options = {});

struct Phase1Result {
  std::vector<double> loss_curve;  // summed reconstruction loss per epoch
};

// Trains encoder and decoder with the gate frozen.  Segmentations are drawn
// from the gate for every batch.
Phase1Result train_phase1(SsaeParams& params, std::span<const TrainingExample> corpus,
                          const TrainConfig& config, int epochs, AdamState& state,
                          Rng& rng);

// Same, with fixed segmentations (one per utterance).
Phase1Result train_autoencoder_fixed(AutoencoderParams& params,
                                     std::span<const TrainingExample> corpus,
                                     std::span<const BoundarySet> boundaries,
                                     const TrainConfig& config, int epochs,
                                     AdamState& state, Rng& rng);

struct IterationMetrics {
  int iteration = 0;
  double phase1_loss = 0.0;  // last phase-1 epoch
  double mean_reward = 0.0;
  double mean_r_mse = 0.0;
  double mean_r_nt = 0.0;
  double mean_nt = 0.0;
};

struct TrainObserver {
  std::function<void(int iteration, const SsaeParams&)> on_phase1_start;
  std::function<void(const IterationMetrics&, const SsaeParams&)> on_iteration_end;
};

struct TrainResult {
  SsaeParams params;
  std::vector<IterationMetrics> metrics;
};

// Seed of the fresh encoder/decoder draw at the start of a phase 1.
std::uint64_t autoencoder_init_seed(std::uint64_t seed, int iteration);

// Alternates phase 1 and phase 2.  Encoder and decoder are re-initialized
// before every phase 1; the gate persists.  Each phase appends one JSON line
// to metrics_log when given.
TrainResult train_iterative(std::span<const TrainingExample> corpus,
                            const SsaeDims& dims, const TrainConfig& config,
                            const TrainObserver& observer = {},
                            std::ostream* metrics_log = nullptr);

}  // namespace segaw
