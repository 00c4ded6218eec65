// include/segaw/pipeline/experiment.h

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
#include <string>
#include <vector>

#include "segaw/eval/metrics.h"
#include "segaw/pipeline/system.h"
#include "segaw/gas/gas.h"
#include "segaw/synth/corpus.h"
#include "segaw/train/trainer.h"

namespace segaw {

// End-to-end desk experiment on a synthetic corpus: GAS baseline, iterative
// SSAE training, segmentation and spoken term detection against baselines.
struct ExperimentConfig {
  SynthConfig synth;
  GasConfig gas;
  SsaeDims dims;
  TrainConfig train;
  int oracle_epochs = 15;  // autoencoder trained on reference boundaries
  int query_words = 5;
  int queries_per_word = 6;
  int tolerance = 4;
};

// Desk-scale defaults for the given seed.
ExperimentConfig desk_experiment_config(std::uint64_t seed);

struct IterationReport {
  int iteration = 0;
  double sampled_nt = 0.0;  // mean N/T of phase-2 samples
  double greedy_nt = 0.0;   // mean N/T of greedy test segmentations
  PrfReport prf;            // greedy test segmentation
};

struct ExperimentResult {
  double word_rate = 0.0;
  PrfReport random_prf;
  PrfReport gas_prf;
  PrfReport ssae_prf;
  std::vector<IterationReport> iterations;
  double map_ssae = 0.0;
  double map_oracle = 0.0;
  double map_dtw = 0.0;
  double map_random = 0.0;
  SsaeSystem system;
};

using ExperimentLog = std::function<void(const std::string&)>;

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentLog& log = {});

}  // namespace segaw
