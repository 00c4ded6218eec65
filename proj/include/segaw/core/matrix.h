// include/segaw/core/matrix.h

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

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include "segaw/core/errors.h"

namespace segaw {

// Compute matrices are column-major; a column is one sequence in a batch.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Frame matrices (T x d) are row-major so that a frame is contiguous.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rng = std::mt19937_64;

// Derives an independent stream seed from a base seed and a tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t base, const std::string& tag);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool all_finite(const Matrix& m);

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& what);

// Fills with i.i.d. uniform values in [-scale, scale].
void fill_uniform(Matrix& m, double scale, Rng& rng);

// Named, mutable view of one parameter tensor.
struct ParamRef {
  std::string name;
  Matrix* value;
};
using ParamList = std::vector<ParamRef>;

// Every parameter struct P provides
//   template <class Self, class F> static void visit(Self& p, const std::string& prefix, F&& f)
// with Self = P or const P, calling f(name, matrix) once per tensor in a fixed
// order.
template <class P, class F>
void visit_params(P& p, const std::string& prefix, F&& f) {
  std::remove_const_t<P>::visit(p, prefix, f);
}

template <class P>
ParamList param_list(P& p, const std::string& prefix = "") {
  ParamList out;
  visit_params(p, prefix, [&](const std::string& name, Matrix& m) {
    out.push_back({name, &m});
  });
  return out;
}

template <class P>
P zeros_like(const P& p) {
  P z = p;
  visit_params(z, "", [](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

template <class P>
std::size_t param_count(const P& p) {
  std::size_t n = 0;
  visit_params(p, "", [&](const std::string&, const Matrix& m) {
    n += static_cast<std::size_t>(m.size());
  });
  return n;
}

// Bitwise equality across every tensor of two parameter structs.
template <class P>
bool params_identical(const P& a, const P& b) {
  std::vector<const Matrix*> lhs, rhs;
  visit_params(a, "", [&](const std::string&, const Matrix& m) { lhs.push_back(&m); });
  visit_params(b, "", [&](const std::string&, const Matrix& m) { rhs.push_back(&m); });
  if (lhs.size() != rhs.size()) return false;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (lhs[i]->rows() != rhs[i]->rows() || lhs[i]->cols() != rhs[i]->cols())
      return false;
    for (Eigen::Index k = 0; k < lhs[i]->size(); ++k)
      if (lhs[i]->data()[k] != rhs[i]->data()[k]) return false;
  }
  return true;
}

// Global L2 norm of a gradient list.
double global_norm(const ParamList& grads);

// Rescales grads so that their global norm is at most max_norm. Returns the
// norm before clipping.
double clip_global_norm(const ParamList& grads, double max_norm);

}  // namespace segaw
