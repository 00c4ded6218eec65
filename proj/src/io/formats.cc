// src/io/formats.cc

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

#include "segaw/io/formats.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "segaw/core/errors.h"
#include "segaw/io/binary.h"

namespace segaw {

namespace {

constexpr std::uint32_t kVersion = 1;

std::uint32_t checked_u32(Eigen::Index v, const char* what) {
  if (v < 0 || v > std::numeric_limits<std::uint32_t>::max())
    throw ShapeError(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

template <class P>
void load_params(P& model, const Checkpoint& ck, const std::string& prefix) {
  std::map<std::string, const Matrix*> by_name;
  for (const auto& [name, m] : ck.params) by_name[name] = &m;
  visit_params(model, prefix, [&](const std::string& name, Matrix& m) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError("checkpoint: missing parameter " + name);
    if (it->second->rows() != m.rows() || it->second->cols() != m.cols())
      throw FormatError("checkpoint: parameter " + name + " has shape " +
                        std::to_string(it->second->rows()) + "x" +
                        std::to_string(it->second->cols()) + ", expected " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    m = *it->second;
  });
}

template <class P>
void store_params(const P& model, Checkpoint& ck, const std::string& prefix) {
  visit_params(model, prefix,
               [&](const std::string& name, const Matrix& m) { ck.params.emplace_back(name, m); });
}

void require_kind(const Checkpoint& ck, const std::string& kind) {
  if (ck.kind != kind)
    throw CompatibilityError("checkpoint holds a '" + ck.kind + "' model, expected '" + kind + "'");
}

std::vector<int> parse_int_list(const std::string& s, int line) {
  std::vector<int> out;
  if (s.empty()) return out;
  std::size_t at = 0;
  while (at <= s.size()) {
    const auto comma = s.find(',', at);
    const std::string item = s.substr(at, comma == std::string::npos ? std::string::npos : comma - at);
    int v = 0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || end != item.data() + item.size() || item.empty())
      throw FormatError("manifest line " + std::to_string(line) + ": bad integer '" + item + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    at = comma + 1;
  }
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_features(const RowMatrix& frames) {
  ByteWriter w;
  w.tag("SGAW");
  w.u32(kVersion);
  w.u32(checked_u32(frames.rows(), "frame count"));
  w.u32(checked_u32(frames.cols(), "feature dim"));
  for (Eigen::Index t = 0; t < frames.rows(); ++t)
    for (Eigen::Index j = 0; j < frames.cols(); ++j) w.f32(static_cast<float>(frames(t, j)));
  return w.bytes();
}

RowMatrix decode_features(const std::vector<std::uint8_t>& bytes, const std::string& what) {
  ByteReader r(bytes, what);
  r.header("SGAW", kVersion);
  const std::uint32_t T = r.u32();
  const std::uint32_t d = r.u32();
  const std::size_t payload = 4ull * T * d;
  r.need(payload, "payload of " + std::to_string(T) + "x" + std::to_string(d) + " floats");
  RowMatrix frames(T, d);
  for (std::uint32_t t = 0; t < T; ++t)
    for (std::uint32_t j = 0; j < d; ++j) frames(t, j) = r.f32();
  r.finish();
  return frames;
}

void save_features(const std::string& path, const RowMatrix& frames) {
  atomic_write_file(path, encode_features(frames));
}

FeatureMatrix load_features(const std::string& path, const std::string& id) {
  FeatureMatrix f;
  f.id = id;
  f.frames = decode_features(read_file(path), path);
  return f;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck) {
  ByteWriter w;
  w.tag("SGCK");
  w.u32(kVersion);
  w.str(ck.kind);
  w.u64(ck.seed);
  w.u32(static_cast<std::uint32_t>(ck.config.size()));
  for (const auto& [k, v] : ck.config) {
    w.str(k);
    w.str(v);
  }
  w.u32(static_cast<std::uint32_t>(ck.params.size()));
  for (const auto& [name, m] : ck.params) {
    w.str(name);
    w.u32(checked_u32(m.rows(), "parameter rows"));
    w.u32(checked_u32(m.cols(), "parameter cols"));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) w.f64(m(i, j));
  }
  return w.bytes();
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes, const std::string& what) {
  ByteReader r(bytes, what);
  r.header("SGCK", kVersion);
  Checkpoint ck;
  ck.kind = r.str();
  ck.seed = r.u64();
  const std::uint32_t n_config = r.u32();
  for (std::uint32_t i = 0; i < n_config; ++i) {
    std::string k = r.str();
    ck.config[k] = r.str();
  }
  const std::uint32_t n_params = r.u32();
  for (std::uint32_t i = 0; i < n_params; ++i) {
    std::string name = r.str();
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    r.need(8ull * rows * cols, "parameter " + name);
    Matrix m(rows, cols);
    for (std::uint32_t a = 0; a < rows; ++a)
      for (std::uint32_t b = 0; b < cols; ++b) m(a, b) = r.f64();
    ck.params.emplace_back(std::move(name), std::move(m));
  }
  r.finish();
  return ck;
}

std::uint64_t save_checkpoint(const std::string& path, const Checkpoint& ck) {
  const auto bytes = encode_checkpoint(ck);
  atomic_write_file(path, bytes);
  return fnv1a64(bytes);
}

Checkpoint load_checkpoint(const std::string& path) {
  return decode_checkpoint(read_file(path), path);
}

Checkpoint gas_checkpoint(const GasModel& model, ConfigMap config, std::uint64_t seed) {
  Checkpoint ck;
  ck.kind = "gas";
  ck.seed = seed;
  config["feature_dim"] = std::to_string(model.feature_dim());
  config["gas_dim"] = std::to_string(model.hidden_dim());
  ck.config = std::move(config);
  store_params(model, ck, "gas.");
  return ck;
}

namespace {

int dim_entry(const Checkpoint& ck, const std::string& key) {
  config_required(ck.config, key);
  const int v = config_int(ck.config, key, 0);
  if (v < 1) throw FormatError("checkpoint: " + key + " must be positive");
  return v;
}

GasModel gas_part(const Checkpoint& ck) {
  GasModel m(dim_entry(ck, "feature_dim"), dim_entry(ck, "gas_dim"));
  load_params(m, ck, "gas.");
  m.trained = true;
  return m;
}

}  // namespace

GasModel gas_from_checkpoint(const Checkpoint& ck) {
  require_kind(ck, "gas");
  return gas_part(ck);
}

Checkpoint ssae_checkpoint(const SsaeSystem& system, ConfigMap config, std::uint64_t seed) {
  Checkpoint ck = gas_checkpoint(system.gas, std::move(config), seed);
  ck.kind = "ssae";
  const SsaeDims& d = system.ssae.dims;
  if (d.feature_dim != system.gas.feature_dim() || d.gas_dim != system.gas.hidden_dim())
    throw ShapeError("ssae_checkpoint: GAS model does not match the SSAE input");
  ck.config["encoder_hidden"] = std::to_string(d.encoder_hidden);
  ck.config["decoder_hidden"] = std::to_string(d.decoder_hidden);
  ck.config["gate_hidden"] = std::to_string(d.gate_hidden);
  ck.config["gate_layers"] = std::to_string(d.gate_layers);
  store_params(system.ssae, ck, "ssae.");
  return ck;
}

SsaeSystem ssae_from_checkpoint(const Checkpoint& ck) {
  require_kind(ck, "ssae");
  SsaeSystem s;
  s.gas = gas_part(ck);
  SsaeDims d;
  d.feature_dim = dim_entry(ck, "feature_dim");
  d.gas_dim = dim_entry(ck, "gas_dim");
  d.encoder_hidden = dim_entry(ck, "encoder_hidden");
  d.decoder_hidden = dim_entry(ck, "decoder_hidden");
  d.gate_hidden = dim_entry(ck, "gate_hidden");
  d.gate_layers = dim_entry(ck, "gate_layers");
  s.ssae = SsaeParams::zeros(d);
  load_params(s.ssae, ck, "ssae.");
  return s;
}

std::vector<std::uint8_t> encode_index(const EmbeddingIndex& index) {
  ByteWriter w;
  w.tag("SGIX");
  w.u32(kVersion);
  w.u64(index.fingerprint);
  w.u32(static_cast<std::uint32_t>(index.dim));
  w.u32(static_cast<std::uint32_t>(index.entries.size()));
  for (const auto& e : index.entries) {
    if (e.embeddings.size() != e.boundaries.num_segments() || e.embeddings.dim() != index.dim)
      throw ShapeError("index entry " + e.id + " does not match its boundaries or the index dim");
    w.str(e.id);
    w.u32(static_cast<std::uint32_t>(e.boundaries.num_frames()));
    w.u32(static_cast<std::uint32_t>(e.boundaries.num_segments()));
    for (int end : e.boundaries.ends()) w.u32(static_cast<std::uint32_t>(end));
    for (int s = 0; s < e.embeddings.size(); ++s)
      for (int j = 0; j < index.dim; ++j) w.f64(e.embeddings.vectors(s, j));
  }
  return w.bytes();
}

EmbeddingIndex decode_index(const std::vector<std::uint8_t>& bytes, const std::string& what) {
  ByteReader r(bytes, what);
  r.header("SGIX", kVersion);
  EmbeddingIndex index;
  index.fingerprint = r.u64();
  index.dim = static_cast<int>(r.u32());
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    IndexEntry e;
    e.id = r.str();
    const auto T = static_cast<int>(r.u32());
    const std::uint32_t n = r.u32();
    r.need(4ull * n, "boundaries of " + e.id);
    std::vector<int> ends(n);
    for (auto& x : ends) x = static_cast<int>(r.u32());
    try {
      e.boundaries = BoundarySet::from_ends(ends, T);
    } catch (const Error& err) {
      throw FormatError(what + ": invalid boundaries for " + e.id + " before byte " +
                        std::to_string(r.offset()) + ": " + err.what());
    }
    r.need(8ull * n * static_cast<std::size_t>(index.dim), "embeddings of " + e.id);
    e.embeddings.vectors.resize(n, index.dim);
    for (std::uint32_t s = 0; s < n; ++s)
      for (int j = 0; j < index.dim; ++j) e.embeddings.vectors(s, j) = r.f64();
    index.entries.push_back(std::move(e));
  }
  r.finish();
  return index;
}

void save_index(const std::string& path, const EmbeddingIndex& index) {
  atomic_write_file(path, encode_index(index));
}

EmbeddingIndex load_index(const std::string& path) { return decode_index(read_file(path), path); }

void check_index_fingerprint(const EmbeddingIndex& index, std::uint64_t fingerprint) {
  if (index.fingerprint != fingerprint) {
    std::ostringstream s;
    s << std::hex << "index was built from checkpoint " << index.fingerprint
      << ", not from the given checkpoint " << fingerprint;
    throw CompatibilityError(s.str());
  }
}

std::string format_manifest(const std::vector<ManifestEntry>& entries) {
  std::string out;
  for (const auto& e : entries)
    out += e.id + "\t" + join(e.boundaries.ends()) + "\t" + join(e.word_ids) + "\n";
  return out;
}

std::vector<ManifestEntry> parse_manifest(const std::string& text) {
  std::vector<ManifestEntry> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto a = line.find('\t');
    const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos || line.find('\t', b + 1) != std::string::npos)
      throw FormatError("manifest line " + std::to_string(number) + ": expected 3 tab-separated fields");
    ManifestEntry e;
    e.id = line.substr(0, a);
    const std::vector<int> ends = parse_int_list(line.substr(a + 1, b - a - 1), number);
    e.word_ids = parse_int_list(line.substr(b + 1), number);
    if (ends.empty()) throw FormatError("manifest line " + std::to_string(number) + ": no boundaries");
    try {
      e.boundaries = BoundarySet::from_ends(ends, ends.back());
    } catch (const Error& err) {
      throw FormatError("manifest line " + std::to_string(number) + ": " + err.what());
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  const auto bytes = read_file(path);
  return parse_manifest(std::string(bytes.begin(), bytes.end()));
}

}  // namespace segaw
