// include/segaw/io/formats.h

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
#include <utility>
#include <vector>

#include "segaw/core/types.h"
#include "segaw/gas/gas.h"
#include "segaw/io/config.h"
#include "segaw/model/ssae.h"
#include "segaw/pipeline/system.h"
#include "segaw/synth/corpus.h"

namespace segaw {

// Feature file: "SGAW", u32 version 1, u32 T, u32 d, T*d f32 row-major.
std::vector<std::uint8_t> encode_features(const RowMatrix& frames);
RowMatrix decode_features(const std::vector<std::uint8_t>& bytes, const std::string& what = "features");
void save_features(const std::string& path, const RowMatrix& frames);
FeatureMatrix load_features(const std::string& path, const std::string& id);

// Checkpoint: "SGCK", u32 version 1, kind, u64 seed, config entries, then
// named parameter blobs (u32 rows, u32 cols, f64 row-major).
struct Checkpoint {
  std::string kind;  // "gas" or "ssae"
  std::uint64_t seed = 0;
  ConfigMap config;  // training configuration and model dimensions
  std::vector<std::pair<std::string, Matrix>> params;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes, const std::string& what = "checkpoint");
// Returns the FNV-1a fingerprint of the written bytes.
std::uint64_t save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint gas_checkpoint(const GasModel& model, ConfigMap config, std::uint64_t seed);
GasModel gas_from_checkpoint(const Checkpoint& ck);
Checkpoint ssae_checkpoint(const SsaeSystem& system, ConfigMap config, std::uint64_t seed);
SsaeSystem ssae_from_checkpoint(const Checkpoint& ck);

// Index: "SGIX", u32 version 1, u64 checkpoint fingerprint, u32 dim, u32
// count, then per document its id, u32 T, u32 N, N u32 ends and N*dim f64.
struct IndexEntry {
  std::string id;
  BoundarySet boundaries;
  EmbeddingSequence embeddings;
};

struct EmbeddingIndex {
  std::uint64_t fingerprint = 0;
  int dim = 0;
  std::vector<IndexEntry> entries;
};

std::vector<std::uint8_t> encode_index(const EmbeddingIndex& index);
EmbeddingIndex decode_index(const std::vector<std::uint8_t>& bytes, const std::string& what = "index");
void save_index(const std::string& path, const EmbeddingIndex& index);
EmbeddingIndex load_index(const std::string& path);

// Throws CompatibilityError unless the index was built from the checkpoint
// with this fingerprint.
void check_index_fingerprint(const EmbeddingIndex& index, std::uint64_t fingerprint);

// Corpus manifest: one line per utterance, `id<TAB>ends<TAB>word ids` with
// comma-separated lists.  Features live in <dir>/<id>.feat.
struct ManifestEntry {
  std::string id;
  BoundarySet boundaries;
  std::vector<int> word_ids;
};

std::string format_manifest(const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> parse_manifest(const std::string& text);
std::vector<ManifestEntry> load_manifest(const std::string& path);

}  // namespace segaw
