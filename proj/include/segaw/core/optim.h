// include/segaw/core/optim.h

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

#include <functional>
#include <string>
#include <vector>

#include "segaw/core/matrix.h"

namespace segaw {

// Numerically stable softmax. Throws DomainError on an empty vector.
Vector softmax(const Vector& logits);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators for one parameter list, in list order.
struct AdamState {
  AdamConfig config;
  long step = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;

  AdamState() = default;
  AdamState(const ParamList& params, AdamConfig config);
};

// One bias-corrected Adam descent step. Throws TrainingError naming the first
// parameter whose gradient is not finite; no parameter is modified then.
void adam_update(const ParamList& params, const ParamList& grads,
                 AdamState& state);

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_param;
  long worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  long coordinates_checked = 0;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Relative error is |analytic - numeric| / max(|numeric|, denominator_floor).
  double denominator_floor = 1e-6;
  // When positive, at most this many coordinates per tensor are sampled.
  long max_coords_per_param = 0;
  std::uint64_t seed = 0;
};

// Compares analytic gradients against central differences of loss().  The
// loss closure must read the current values behind params.  Throws
// TrainingError if the loss is non-finite at any probe.
GradCheckReport finite_diff_check(const std::function<double()>& loss,
                                  const ParamList& params,
                                  const ParamList& analytic,
                                  const GradCheckOptions& options = {});

}  // namespace segaw
