// tests/features_test.cc

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

#include <cmath>
#include <cstdio>
#include <numbers>

#include "doctest.h"
#include "segaw/core/errors.h"
#include "segaw/features/mfcc.h"
#include "segaw/features/wav.h"

using namespace segaw;

namespace {

std::vector<double> sine(double hz, int n, double amp = 8000.0) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = amp * std::sin(2 * std::numbers::pi * hz * i / 16000.0);
  return x;
}

double mel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

// Straight-line reference: naive DFT, explicit filter and DCT sums.
std::vector<double> reference_frame(const std::vector<double>& pcm, int start, const MfccConfig& c) {
  const int W = c.window_length, N = c.fft_size;
  std::vector<double> x(static_cast<std::size_t>(W));
  double mean = 0;
  for (int i = 0; i < W; ++i) mean += pcm[static_cast<std::size_t>(start + i)] / W;
  double energy = 0;
  for (int i = 0; i < W; ++i) {
    x[i] = pcm[static_cast<std::size_t>(start + i)] - mean;
    energy += x[i] * x[i];
  }
  std::vector<double> y(x);
  y[0] = x[0] - c.preemphasis * x[0];
  for (int i = 1; i < W; ++i) y[i] = x[i] - c.preemphasis * x[i - 1];
  for (int i = 0; i < W; ++i) y[i] *= 0.54 - 0.46 * std::cos(2 * std::numbers::pi * i / (W - 1));
  std::vector<double> power(static_cast<std::size_t>(N / 2 + 1));
  for (int k = 0; k <= N / 2; ++k) {
    double re = 0, im = 0;
    for (int i = 0; i < W; ++i) {
      re += y[i] * std::cos(2 * std::numbers::pi * k * i / N);
      im -= y[i] * std::sin(2 * std::numbers::pi * k * i / N);
    }
    power[k] = re * re + im * im;
  }
  const double lo = mel(c.low_freq), hi = mel(c.high_freq), step = (hi - lo) / (c.num_mel + 1);
  std::vector<double> logmel(static_cast<std::size_t>(c.num_mel));
  for (int m = 0; m < c.num_mel; ++m) {
    double s = 0;
    for (int k = 0; k <= N / 2; ++k) {
      const double f = mel(k * 16000.0 / N);
      const double l = lo + m * step, ce = l + step, r = ce + step;
      double w = 0;
      if (f > l && f <= ce) w = (f - l) / step;
      else if (f > ce && f < r) w = (r - f) / step;
      s += w * power[k];
    }
    logmel[m] = std::log(std::max(s, c.log_floor));
  }
  std::vector<double> cep(static_cast<std::size_t>(c.num_ceps));
  for (int i = 0; i < c.num_ceps; ++i) {
    double s = 0;
    for (int j = 0; j < c.num_mel; ++j)
      s += logmel[j] * std::cos(std::numbers::pi * i * (j + 0.5) / c.num_mel);
    cep[i] = s * std::sqrt((i == 0 ? 1.0 : 2.0) / c.num_mel);
  }
  cep[0] = std::log(std::max(energy, c.log_floor));
  return cep;
}

}  // namespace

TEST_CASE("mfcc frame count and dimension") {
  const FeatureMatrix f = compute_mfcc(sine(440, 16000), 16000);
  CHECK(f.num_frames() == 98);
  CHECK(f.dim() == 39);
  CHECK(compute_mfcc(sine(440, 400), 16000).num_frames() == 1);
  CHECK(compute_mfcc(sine(440, 559), 16000).num_frames() == 1);
  CHECK(compute_mfcc(sine(440, 560), 16000).num_frames() == 2);
}

TEST_CASE("mfcc input errors") {
  CHECK_THROWS_AS(compute_mfcc(sine(440, 399), 16000), InputError);
  CHECK_THROWS_AS(compute_mfcc(sine(440, 16000), 8000), InputError);
  MfccConfig c;
  c.num_ceps = 40;
  CHECK_THROWS_AS(compute_mfcc(sine(440, 16000), 16000, c), ConfigError);
}

TEST_CASE("mfcc matches a naive reference") {
  MfccConfig c;
  c.deltas = false;
  std::vector<double> pcm = sine(440, 4000);
  const std::vector<double> chirp = sine(1700, 4000, 3000.0);
  for (std::size_t i = 0; i < pcm.size(); ++i) pcm[i] += chirp[i] + 50.0 * std::cos(0.37 * i * i / 100.0);
  const FeatureMatrix f = compute_mfcc(pcm, 16000, c);
  for (int t : {0, 5, f.num_frames() - 1}) {
    const auto ref = reference_frame(pcm, t * 160, c);
    for (int i = 0; i < 13; ++i) CHECK(f.frames(t, i) == doctest::Approx(ref[i]).epsilon(1e-9));
  }
}

TEST_CASE("silence gives identical frames and zero deltas") {
  const FeatureMatrix f = compute_mfcc(std::vector<double>(8000, 0.0), 16000);
  for (int t = 1; t < f.num_frames(); ++t) CHECK(f.frames.row(t) == f.frames.row(0));
  CHECK((f.frames.rightCols(26).array() == 0.0).all());
}

TEST_CASE("different tones give different cepstra") {
  const FeatureMatrix a = compute_mfcc(sine(440, 16000), 16000);
  const FeatureMatrix b = compute_mfcc(sine(880, 16000), 16000);
  const Vector ma = a.frames.colwise().mean().transpose();
  const Vector mb = b.frames.colwise().mean().transpose();
  CHECK(ma.dot(mb) / (ma.norm() * mb.norm()) < 0.999);
  CHECK(compute_mfcc(sine(440, 16000), 16000).frames == a.frames);
}

TEST_CASE("deltas") {
  RowMatrix x(5, 1);
  x << 0, 1, 2, 3, 4;
  const RowMatrix d = compute_deltas(x);
  // Interior frames of a unit ramp have slope 1; edges see replicated frames.
  CHECK(d(2, 0) == doctest::Approx(1.0));
  CHECK(d(0, 0) == doctest::Approx((1 * (1 - 0) + 2 * (2 - 0)) / 10.0));
  CHECK(d(1, 0) == doctest::Approx((1 * (2 - 0) + 2 * (3 - 0)) / 10.0));
  CHECK(d(4, 0) == doctest::Approx((1 * (4 - 3) + 2 * (4 - 2)) / 10.0));
}

TEST_CASE("cmvn") {
  FeatureMatrix f;
  f.frames.resize(3, 2);
  f.frames << 1, 5, 2, 5, 3, 5;
  const FeatureMatrix n = apply_cmvn(f);
  CHECK(n.frames(0, 0) == doctest::Approx(-1.224744871391589).epsilon(1e-12));
  CHECK(n.frames(1, 0) == doctest::Approx(0.0));
  CHECK(n.frames(2, 0) == doctest::Approx(1.224744871391589).epsilon(1e-12));
  CHECK((n.frames.col(1).array() == 0.0).all());

  std::vector<double> pcm = sine(300, 12000);
  for (std::size_t i = 0; i < pcm.size(); ++i)
    pcm[i] = pcm[i] * (1.0 + std::sin(i / 900.0)) + 2000.0 * std::cos(0.37 * i * i / 100.0);
  const FeatureMatrix m = apply_cmvn(compute_mfcc(pcm, 16000));
  for (int j = 0; j < m.dim(); ++j) {
    const double mean = m.frames.col(j).mean();
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::abs(m.frames.col(j).squaredNorm() / m.num_frames() - 1.0) < 1e-3);
  }
  CHECK((apply_cmvn(m).frames - m.frames).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("wav round trip and validation") {
  WavAudio a;
  a.samples = {0, 1, -1, 32767, -32768, 1234};
  const auto bytes = encode_wav(a);
  CHECK(bytes.size() == 44 + 12);
  CHECK(parse_wav(bytes).samples == a.samples);

  const std::string path = "features_test_tmp.wav";
  write_wav(path, a);
  CHECK(read_wav(path).samples == a.samples);
  std::remove(path.c_str());

  WavAudio wrong = a;
  wrong.sample_rate = 8000;
  CHECK_THROWS_AS(parse_wav(encode_wav(wrong)), InputError);
  auto stereo = bytes;
  stereo[22] = 2;
  CHECK_THROWS_AS(parse_wav(stereo), InputError);
  auto truncated = bytes;
  truncated.resize(50);
  CHECK_THROWS_AS(parse_wav(truncated), FormatError);
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(parse_wav(bad), FormatError);
}
