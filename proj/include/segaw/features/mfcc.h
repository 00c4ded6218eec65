// include/segaw/features/mfcc.h

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

#include <span>

#include "segaw/core/types.h"

namespace segaw {

struct MfccConfig {
  int sample_rate = 16000;
  int window_length = 400;  // 25 ms
  int hop_length = 160;     // 10 ms
  int fft_size = 512;
  int num_mel = 26;
  int num_ceps = 13;
  double low_freq = 20.0;
  double high_freq = 8000.0;
  double preemphasis = 0.97;
  double log_floor = 1e-10;  // applied to energies before the log
  bool use_energy = true;    // replace c0 by log frame energy
  bool deltas = true;        // append Δ and ΔΔ

  int dim() const { return deltas ? 3 * num_ceps : num_ceps; }
  void validate() const;
};

// T = floor((N - window) / hop) + 1 frames.  Throws InputError on a sample
// rate other than config.sample_rate or a signal shorter than one window.
FeatureMatrix compute_mfcc(std::span<const double> pcm, int sample_rate,
                           const MfccConfig& config = {});

// Regression deltas over ±window frames with edge replication.
RowMatrix compute_deltas(const RowMatrix& x, int window = 2);

// Per-dimension zero mean and unit population variance; constant columns
// become zero.
FeatureMatrix apply_cmvn(const FeatureMatrix& f);

}  // namespace segaw
