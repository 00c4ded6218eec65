// include/segaw/pipeline/gradcheck.h

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
#include <string>
#include <vector>

#include "segaw/core/optim.h"

namespace segaw {

struct NamedGradCheck {
  std::string name;
  GradCheckReport report;
};

// Finite-difference checks of every analytic gradient on small seeded
// instances (T <= 6, dims <= 4): SSAE reconstruction through segment resets
// (free-running and teacher-forced), the gate log-policy and the GAS
// autoencoder.
std::vector<NamedGradCheck> run_gradchecks(std::uint64_t seed);

}  // namespace segaw
