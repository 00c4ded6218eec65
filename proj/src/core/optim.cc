// src/core/optim.cc

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

#include "segaw/core/optim.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace segaw {

Vector softmax(const Vector& logits) {
  if (logits.size() == 0) throw DomainError("softmax: empty input");
  const double top = logits.maxCoeff();
  Vector e = (logits.array() - top).exp().matrix();
  return e / e.sum();
}

AdamState::AdamState(const ParamList& params, AdamConfig cfg) : config(cfg) {
  for (const auto& p : params) {
    first_moment.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
    second_moment.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
  }
}

void adam_update(const ParamList& params, const ParamList& grads,
                 AdamState& state) {
  if (params.size() != grads.size() ||
      params.size() != state.first_moment.size())
    throw ShapeError("adam_update: parameter, gradient and state lists differ");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& p = *params[i].value;
    const Matrix& g = *grads[i].value;
    if (g.rows() != p.rows() || g.cols() != p.cols() ||
        state.first_moment[i].rows() != p.rows() ||
        state.first_moment[i].cols() != p.cols())
      throw ShapeError("adam_update: shape mismatch for " + params[i].name);
    if (!g.allFinite())
      throw TrainingError("non-finite gradient for parameter " +
                          params[i].name);
  }
  ++state.step;
  const AdamConfig& c = state.config;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = *grads[i].value;
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    params[i].value->array() -=
        c.learning_rate * (m.array() / bc1) /
        ((v.array() / bc2).sqrt() + c.epsilon);
  }
}

GradCheckReport finite_diff_check(const std::function<double()>& loss,
                                  const ParamList& params,
                                  const ParamList& analytic,
                                  const GradCheckOptions& options) {
  if (params.size() != analytic.size())
    throw ShapeError("finite_diff_check: parameter and gradient lists differ");
  GradCheckReport report;
  Rng rng(options.seed);
  auto probe = [&](const std::string& name) {
    const double v = loss();
    if (!std::isfinite(v))
      throw TrainingError("finite_diff_check: non-finite loss while probing " +
                          name);
    return v;
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i].value;
    const Matrix& g = *analytic[i].value;
    if (g.rows() != p.rows() || g.cols() != p.cols())
      throw ShapeError("finite_diff_check: shape mismatch for " +
                       params[i].name);
    std::vector<long> coords(static_cast<std::size_t>(p.size()));
    std::iota(coords.begin(), coords.end(), 0L);
    if (options.max_coords_per_param > 0 &&
        static_cast<long>(coords.size()) > options.max_coords_per_param) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(static_cast<std::size_t>(options.max_coords_per_param));
      std::sort(coords.begin(), coords.end());
    }
    for (long k : coords) {
      double& x = p.data()[k];
      const double saved = x;
      x = saved + options.epsilon;
      const double up = probe(params[i].name);
      x = saved - options.epsilon;
      const double down = probe(params[i].name);
      x = saved;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double a = g.data()[k];
      const double rel = std::abs(a - numeric) /
                         std::max(std::abs(numeric), options.denominator_floor);
      ++report.coordinates_checked;
      if (rel > report.max_relative_error || report.worst_index < 0) {
        report.max_relative_error = rel;
        report.worst_param = params[i].name;
        report.worst_index = k;
        report.analytic = a;
        report.numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace segaw
