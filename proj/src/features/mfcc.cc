// src/features/mfcc.cc

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

#include "segaw/features/mfcc.h"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "segaw/core/errors.h"

namespace segaw {

void MfccConfig::validate() const {
  if (sample_rate <= 0 || window_length <= 0 || hop_length <= 0)
    throw ConfigError("mfcc: sample rate, window and hop must be positive");
  if (fft_size < window_length) throw ConfigError("mfcc: fft_size smaller than the window");
  if (num_mel < 1 || num_ceps < 1 || num_ceps > num_mel)
    throw ConfigError("mfcc: need 1 <= num_ceps <= num_mel");
  if (!(low_freq >= 0.0 && low_freq < high_freq && high_freq <= 0.5 * sample_rate))
    throw ConfigError("mfcc: need 0 <= low_freq < high_freq <= nyquist");
  if (!(log_floor > 0.0)) throw ConfigError("mfcc: log_floor must be positive");
}

namespace {

double hz_to_mel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

// num_mel x (fft_size/2+1) triangular filters equally spaced on the mel scale.
Matrix mel_filterbank(const MfccConfig& c) {
  const int bins = c.fft_size / 2 + 1;
  Matrix fb = Matrix::Zero(c.num_mel, bins);
  const double lo = hz_to_mel(c.low_freq), hi = hz_to_mel(c.high_freq);
  const double step = (hi - lo) / (c.num_mel + 1);
  for (int m = 0; m < c.num_mel; ++m) {
    const double left = lo + m * step, center = left + step, right = center + step;
    for (int k = 0; k < bins; ++k) {
      const double mel = hz_to_mel(static_cast<double>(k) * c.sample_rate / c.fft_size);
      if (mel > left && mel < right)
        fb(m, k) = mel <= center ? (mel - left) / step : (right - mel) / step;
    }
  }
  return fb;
}

// Orthonormal DCT-II rows 0..num_ceps-1.
Matrix dct_matrix(int num_ceps, int num_mel) {
  Matrix d(num_ceps, num_mel);
  for (int i = 0; i < num_ceps; ++i)
    for (int j = 0; j < num_mel; ++j)
      d(i, j) = std::sqrt((i == 0 ? 1.0 : 2.0) / num_mel) *
                std::cos(std::numbers::pi * i * (j + 0.5) / num_mel);
  return d;
}

struct FftwPlan {
  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;
  explicit FftwPlan(int n) {
    in = static_cast<double*>(fftw_malloc(sizeof(double) * static_cast<std::size_t>(n)));
    out = static_cast<fftw_complex*>(
        fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n / 2 + 1)));
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  ~FftwPlan() {
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
};

}  // namespace

FeatureMatrix compute_mfcc(std::span<const double> pcm, int sample_rate, const MfccConfig& c) {
  c.validate();
  if (sample_rate != c.sample_rate)
    throw InputError("mfcc: expected " + std::to_string(c.sample_rate) + " Hz, got " +
                     std::to_string(sample_rate));
  const auto n = static_cast<int>(pcm.size());
  if (n < c.window_length)
    throw InputError("mfcc: " + std::to_string(n) + " samples is shorter than one window of " +
                     std::to_string(c.window_length));
  const int T = (n - c.window_length) / c.hop_length + 1;
  const Matrix fb = mel_filterbank(c);
  const Matrix dct = dct_matrix(c.num_ceps, c.num_mel);
  Vector window(c.window_length);
  for (int i = 0; i < c.window_length; ++i)
    window(i) = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (c.window_length - 1));

  FftwPlan fft(c.fft_size);
  const int bins = c.fft_size / 2 + 1;
  RowMatrix ceps(T, c.num_ceps);
  Vector frame(c.window_length), power(bins);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < c.window_length; ++i) frame(i) = pcm[static_cast<std::size_t>(t * c.hop_length + i)];
    frame.array() -= frame.mean();
    const double energy = frame.squaredNorm();
    for (int i = c.window_length - 1; i > 0; --i) frame(i) -= c.preemphasis * frame(i - 1);
    frame(0) -= c.preemphasis * frame(0);
    for (int i = 0; i < c.fft_size; ++i) fft.in[i] = i < c.window_length ? frame(i) * window(i) : 0.0;
    fftw_execute(fft.plan);
    for (int k = 0; k < bins; ++k) power(k) = fft.out[k][0] * fft.out[k][0] + fft.out[k][1] * fft.out[k][1];
    const Vector log_mel = (fb * power).array().max(c.log_floor).log().matrix();
    Vector cep = dct * log_mel;
    if (c.use_energy) cep(0) = std::log(std::max(energy, c.log_floor));
    ceps.row(t) = cep.transpose();
  }

  FeatureMatrix f;
  if (!c.deltas) {
    f.frames = std::move(ceps);
    return f;
  }
  const RowMatrix d1 = compute_deltas(ceps);
  const RowMatrix d2 = compute_deltas(d1);
  f.frames.resize(T, 3 * c.num_ceps);
  f.frames << ceps, d1, d2;
  return f;
}

RowMatrix compute_deltas(const RowMatrix& x, int window) {
  if (window < 1) throw DomainError("compute_deltas: window must be positive");
  const auto T = static_cast<int>(x.rows());
  double denom = 0.0;
  for (int k = 1; k <= window; ++k) denom += 2.0 * k * k;
  RowMatrix d = RowMatrix::Zero(x.rows(), x.cols());
  for (int t = 0; t < T; ++t)
    for (int k = 1; k <= window; ++k) {
      const int ahead = std::min(T - 1, t + k), behind = std::max(0, t - k);
      d.row(t) += k * (x.row(ahead) - x.row(behind));
    }
  return d / denom;
}

FeatureMatrix apply_cmvn(const FeatureMatrix& f) {
  FeatureMatrix out = f;
  const double T = static_cast<double>(f.frames.rows());
  if (f.frames.rows() == 0) return out;
  for (Eigen::Index j = 0; j < f.frames.cols(); ++j) {
    auto col = out.frames.col(j);
    const double mean = col.sum() / T;
    col.array() -= mean;
    const double var = col.squaredNorm() / T;
    if (var <= 1e-20 * std::max(1.0, mean * mean))
      col.setZero();
    else
      col /= std::sqrt(var);
  }
  return out;
}

}  // namespace segaw
