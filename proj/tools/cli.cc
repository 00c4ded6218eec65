// tools/cli.cc

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

#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "segaw/core/errors.h"
#include "segaw/eval/metrics.h"
#include "segaw/features/mfcc.h"
#include "segaw/features/wav.h"
#include "segaw/io/binary.h"
#include "segaw/io/config.h"
#include "segaw/io/formats.h"
#include "segaw/match/matching.h"
#include "segaw/pipeline/gradcheck.h"
#include "segaw/pipeline/system.h"
#include "segaw/synth/corpus.h"
#include "segaw/train/trainer.h"

namespace segaw {

namespace {

namespace fs = std::filesystem;

// Settings of one command: defaults, overridden by --config, overridden by
// flags named after the keys with '_' spelled '-'.
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "key = value settings file");
  }

  void add(const std::string& key, const std::string& fallback, const std::string& help) {
    defaults_[key] = fallback;
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    options_[key] = app_->add_option("--" + flag, flags_[key], help + " [" + fallback + "]");
  }

  // Every known key with its effective value.
  ConfigMap resolve() const {
    ConfigMap c = config_path_.empty() ? ConfigMap{} : load_config(config_path_);
    std::set<std::string> known;
    for (const auto& [k, v] : defaults_) known.insert(k);
    check_known_keys(c, known);
    for (const auto& [k, v] : defaults_) c.emplace(k, v);
    for (const auto& [k, opt] : options_)
      if (opt->count() > 0) c[k] = flags_.at(k);
    return c;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, std::string> defaults_;
  std::map<std::string, std::string> flags_;
  std::map<std::string, CLI::Option*> options_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    atomic_write_file(path, text);
}

std::string feature_path(const std::string& manifest, const std::string& id) {
  return (fs::path(manifest).parent_path() / (id + ".feat")).string();
}

// Utterances of a manifest with their features.
std::vector<SynthUtterance> load_corpus(const std::string& manifest) {
  std::vector<SynthUtterance> out;
  for (auto& e : load_manifest(manifest)) {
    SynthUtterance u;
    u.features = load_features(feature_path(manifest, e.id), e.id);
    if (u.features.num_frames() != e.boundaries.num_frames())
      throw InputError("manifest " + manifest + ": " + e.id + " has " +
                       std::to_string(u.features.num_frames()) + " frames, boundaries cover " +
                       std::to_string(e.boundaries.num_frames()));
    u.boundaries = std::move(e.boundaries);
    u.word_ids = std::move(e.word_ids);
    out.push_back(std::move(u));
  }
  if (out.empty()) throw InputError("manifest " + manifest + " lists no utterances");
  return out;
}

std::string format_ends(const BoundarySet& b) {
  std::string s;
  for (std::size_t i = 0; i < b.ends().size(); ++i) s += (i ? "," : "") + std::to_string(b.ends()[i]);
  return s;
}

// Segmentation file: `id<TAB>end frames<TAB>end times in seconds`.
std::string format_segmentation(const std::vector<std::pair<std::string, BoundarySet>>& segs) {
  std::ostringstream s;
  for (const auto& [id, b] : segs) {
    s << id << '\t' << format_ends(b) << '\t';
    for (std::size_t i = 0; i < b.ends().size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", b.ends()[i] * 0.01);
      s << (i ? "," : "") << buf;
    }
    s << '\n';
  }
  return s.str();
}

std::map<std::string, BoundarySet> parse_segmentation(const std::string& path) {
  const auto bytes = read_file(path);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::map<std::string, BoundarySet> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.find('\t');
    const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos) throw FormatError(path + ": expected id, frames and seconds");
    // Reuse the manifest parser for the frame list.
    const auto parsed = parse_manifest(line.substr(0, b) + "\t\n");
    out[parsed[0].id] = parsed[0].boundaries;
  }
  return out;
}

PolicyMode parse_mode(const std::string& s) {
  if (s == "ppo") return PolicyMode::kPpo;
  if (s == "reinforce") return PolicyMode::kReinforce;
  throw ConfigError("mode must be ppo or reinforce, got '" + s + "'");
}

Phase1Segmentation parse_phase1(const std::string& s) {
  if (s == "sample") return Phase1Segmentation::kSample;
  if (s == "greedy") return Phase1Segmentation::kGreedy;
  throw ConfigError("phase1_segmentation must be sample or greedy, got '" + s + "'");
}

struct Loaded {
  Checkpoint checkpoint;
  std::uint64_t fingerprint = 0;
};

Loaded load_model(const std::string& path) {
  const auto bytes = read_file(path);
  return {decode_checkpoint(bytes, path), fnv1a64(bytes)};
}

EmbeddingSequence embed_query(const SsaeSystem& system, const FeatureMatrix& q, bool whole) {
  if (whole) return encode_segments(system.ssae, q, BoundarySet::whole(q.num_frames()));
  return system.embed(q).embeddings;
}

struct Ranked {
  std::string id;
  MatchResult match;
};

// Descending score, ties by ascending id.
std::vector<Ranked> rank(const EmbeddingSequence& query, const EmbeddingIndex& index) {
  std::vector<Ranked> r;
  for (const auto& e : index.entries) r.push_back({e.id, subsequence_score(query, e.embeddings)});
  std::sort(r.begin(), r.end(), [](const Ranked& a, const Ranked& b) {
    if (a.match.score != b.match.score) return a.match.score > b.match.score;
    return a.id < b.id;
  });
  return r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Segmental sequence-to-sequence autoencoder toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with word boundaries");
  Settings synth_set(synth);
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth->add_option("--seed", synth_seed, "Random seed")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();
  {
    const SynthConfig d;
    synth_set.add("lexicon_size", std::to_string(d.lexicon_size), "Number of word templates");
    synth_set.add("dim", std::to_string(d.dim), "Feature dimension");
    synth_set.add("min_word_frames", std::to_string(d.min_word_frames), "Shortest template");
    synth_set.add("max_word_frames", std::to_string(d.max_word_frames), "Longest template");
    synth_set.add("min_words", std::to_string(d.min_words), "Fewest words per utterance");
    synth_set.add("max_words", std::to_string(d.max_words), "Most words per utterance");
    synth_set.add("noise", fmt(d.noise), "Gaussian noise std");
    synth_set.add("min_warp", fmt(d.min_warp), "Smallest time-warp factor");
    synth_set.add("max_warp", fmt(d.max_warp), "Largest time-warp factor");
    synth_set.add("template_step", fmt(d.template_step), "Template random-walk step");
    synth_set.add("train_utterances", std::to_string(d.train_utterances), "Training utterances");
    synth_set.add("test_utterances", std::to_string(d.test_utterances), "Test utterances");
  }
  synth->callback([&] {
    action = [&] {
      const ConfigMap c = synth_set.resolve();
      SynthConfig sc;
      sc.lexicon_size = config_int(c, "lexicon_size", 0);
      sc.dim = config_int(c, "dim", 0);
      sc.min_word_frames = config_int(c, "min_word_frames", 0);
      sc.max_word_frames = config_int(c, "max_word_frames", 0);
      sc.min_words = config_int(c, "min_words", 0);
      sc.max_words = config_int(c, "max_words", 0);
      sc.noise = config_double(c, "noise", 0);
      sc.min_warp = config_double(c, "min_warp", 0);
      sc.max_warp = config_double(c, "max_warp", 0);
      sc.template_step = config_double(c, "template_step", 0);
      sc.train_utterances = config_int(c, "train_utterances", 0);
      sc.test_utterances = config_int(c, "test_utterances", 0);
      sc.seed = synth_seed;
      const SynthCorpus corpus = generate_corpus(sc);
      fs::create_directories(synth_out);
      std::vector<std::uint8_t> digest_input;
      for (const auto& [name, split] :
           {std::pair{"train", &corpus.train}, std::pair{"test", &corpus.test}}) {
        std::vector<ManifestEntry> entries;
        for (const auto& u : *split) {
          save_features((fs::path(synth_out) / (u.features.id + ".feat")).string(), u.features.frames);
          entries.push_back({u.features.id, u.boundaries, u.word_ids});
        }
        const std::string text = format_manifest(entries);
        atomic_write_file((fs::path(synth_out) / (std::string(name) + ".manifest")).string(), text);
        digest_input.insert(digest_input.end(), text.begin(), text.end());
        out << name << "_utterances = " << split->size() << '\n';
      }
      out << "word_rate = " << fmt(word_rate(corpus.train)) << '\n';
      out << "manifest_digest = " << hex(fnv1a64(digest_input)) << '\n';
      return 0;
    };
  });

  // featurize
  auto* featurize = app.add_subcommand("featurize", "Compute MFCC features from 16 kHz mono WAV files");
  Settings feat_set(featurize);
  std::string feat_list, feat_out;
  featurize->add_option("--list", feat_list, "Lines of `id path.wav`")->required();
  featurize->add_option("--out", feat_out, "Output directory")->required();
  {
    const MfccConfig d;
    feat_set.add("window_length", std::to_string(d.window_length), "Window in samples");
    feat_set.add("hop_length", std::to_string(d.hop_length), "Hop in samples");
    feat_set.add("fft_size", std::to_string(d.fft_size), "FFT size");
    feat_set.add("num_mel", std::to_string(d.num_mel), "Mel filters");
    feat_set.add("num_ceps", std::to_string(d.num_ceps), "Cepstra per frame");
    feat_set.add("low_freq", fmt(d.low_freq), "Lowest filter edge in Hz");
    feat_set.add("high_freq", fmt(d.high_freq), "Highest filter edge in Hz");
    feat_set.add("preemphasis", fmt(d.preemphasis), "Pre-emphasis coefficient");
    feat_set.add("deltas", "true", "Append deltas and delta-deltas");
    feat_set.add("cmvn", "true", "Utterance-wise mean and variance normalization");
  }
  featurize->callback([&] {
    action = [&] {
      const ConfigMap c = feat_set.resolve();
      MfccConfig mc;
      mc.window_length = config_int(c, "window_length", 0);
      mc.hop_length = config_int(c, "hop_length", 0);
      mc.fft_size = config_int(c, "fft_size", 0);
      mc.num_mel = config_int(c, "num_mel", 0);
      mc.num_ceps = config_int(c, "num_ceps", 0);
      mc.low_freq = config_double(c, "low_freq", 0);
      mc.high_freq = config_double(c, "high_freq", 0);
      mc.preemphasis = config_double(c, "preemphasis", 0);
      mc.deltas = config_bool(c, "deltas", true);
      const bool cmvn = config_bool(c, "cmvn", true);
      const auto list_bytes = read_file(feat_list);
      std::istringstream in(std::string(list_bytes.begin(), list_bytes.end()));
      fs::create_directories(feat_out);
      std::vector<ManifestEntry> entries;
      std::string line;
      while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string id, path;
        if (!(ls >> id)) continue;
        if (!(ls >> path)) throw InputError(feat_list + ": missing path for " + id);
        if (!fs::path(path).is_absolute()) path = (fs::path(feat_list).parent_path() / path).string();
        const WavAudio wav = read_wav(path);
        const std::vector<double> pcm(wav.samples.begin(), wav.samples.end());
        FeatureMatrix f = compute_mfcc(pcm, wav.sample_rate, mc);
        if (cmvn) f = apply_cmvn(f);
        save_features((fs::path(feat_out) / (id + ".feat")).string(), f.frames);
        entries.push_back({id, BoundarySet::whole(f.num_frames()), {}});
      }
      atomic_write_file((fs::path(feat_out) / "features.manifest").string(), format_manifest(entries));
      out << "utterances = " << entries.size() << '\n';
      return 0;
    };
  });

  // train-gas
  auto* train_gas = app.add_subcommand("train-gas", "Train the GRU autoencoder behind the gate activation signal");
  Settings gas_set(train_gas);
  std::uint64_t gas_seed = 0;
  std::string gas_manifest, gas_out;
  train_gas->add_option("--seed", gas_seed, "Random seed")->required();
  train_gas->add_option("--manifest", gas_manifest, "Training manifest")->required();
  train_gas->add_option("--out", gas_out, "Output checkpoint")->required();
  {
    const GasConfig d;
    gas_set.add("gas_dim", std::to_string(d.hidden_dim), "GRU hidden size");
    gas_set.add("epochs", std::to_string(d.epochs), "Training epochs");
    gas_set.add("batch_size", std::to_string(d.batch_size), "Utterances per update");
    gas_set.add("learning_rate", fmt(d.learning_rate), "Adam learning rate");
    gas_set.add("clip_norm", fmt(d.clip_norm), "Gradient norm clip");
    gas_set.add("chunk_length", std::to_string(d.chunk_length), "Training chunk length, 0 for whole utterances");
  }
  train_gas->callback([&] {
    action = [&] {
      const ConfigMap c = gas_set.resolve();
      GasConfig gc;
      gc.hidden_dim = config_int(c, "gas_dim", 0);
      gc.epochs = config_int(c, "epochs", 0);
      gc.batch_size = config_int(c, "batch_size", 0);
      gc.learning_rate = config_double(c, "learning_rate", 0);
      gc.clip_norm = config_double(c, "clip_norm", 0);
      gc.chunk_length = config_int(c, "chunk_length", 0);
      gc.seed = gas_seed;
      std::vector<FeatureMatrix> features;
      for (auto& u : load_corpus(gas_manifest)) features.push_back(std::move(u.features));
      const GasTrainResult r = train_gas_autoencoder(features, gc);
      const std::uint64_t fp = save_checkpoint(gas_out, gas_checkpoint(r.model, c, gas_seed));
      out << "final_loss = " << fmt(r.loss_curve.empty() ? gas_mse(r.model, features) : r.loss_curve.back())
          << "\nfingerprint = " << hex(fp) << '\n';
      return 0;
    };
  });

  // train
  auto* train = app.add_subcommand("train", "Train the SSAE by alternating reconstruction and policy-gradient phases");
  Settings train_set(train);
  std::uint64_t train_seed = 0;
  std::string train_manifest, train_gas_path, train_out, train_log;
  train->add_option("--seed", train_seed, "Random seed")->required();
  train->add_option("--manifest", train_manifest, "Training manifest")->required();
  train->add_option("--gas", train_gas_path, "GAS checkpoint")->required();
  train->add_option("--out", train_out, "Output checkpoint")->required();
  train->add_option("--metrics-log", train_log, "JSON-lines metrics log");
  {
    const TrainConfig d;
    const SsaeDims dims;
    train_set.add("lambda", fmt(d.lambda), "Weight of the segment-count reward");
    train_set.add("samples", std::to_string(d.samples), "Sampled segmentations per utterance");
    train_set.add("autoencoder_lr", fmt(d.autoencoder_lr), "Encoder/decoder learning rate");
    train_set.add("gate_lr", fmt(d.gate_lr), "Segmentation gate learning rate");
    train_set.add("outer_iterations", std::to_string(d.outer_iterations), "Alternations of the two phases");
    train_set.add("phase1_epochs", std::to_string(d.phase1_epochs), "Reconstruction epochs per iteration");
    train_set.add("phase2_epochs", std::to_string(d.phase2_epochs), "Policy epochs per iteration");
    train_set.add("batch_size", std::to_string(d.batch_size), "Utterances per update");
    train_set.add("mode", "ppo", "Policy update: ppo or reinforce");
    train_set.add("ppo_epsilon", fmt(d.ppo_epsilon), "PPO clip range");
    train_set.add("ppo_epochs", std::to_string(d.ppo_epochs), "PPO updates per batch");
    train_set.add("clip_norm", fmt(d.clip_norm), "Gradient norm clip");
    train_set.add("teacher_forcing", "false", "Feed true frames to the decoder");
    train_set.add("phase1_segmentation", "sample", "Phase-1 segmentations: sample or greedy");
    train_set.add("final_phase1", "true", "Retrain the autoencoder on the final gate");
    train_set.add("encoder_hidden", std::to_string(dims.encoder_hidden), "Encoder LSTM size");
    train_set.add("decoder_hidden", std::to_string(dims.decoder_hidden), "Decoder LSTM size");
    train_set.add("gate_hidden", std::to_string(dims.gate_hidden), "Gate LSTM size");
    train_set.add("gate_layers", std::to_string(dims.gate_layers), "Gate LSTM layers");
  }
  train->callback([&] {
    action = [&] {
      ConfigMap c = train_set.resolve();
      TrainConfig tc;
      tc.lambda = config_double(c, "lambda", 0);
      tc.samples = config_int(c, "samples", 0);
      tc.autoencoder_lr = config_double(c, "autoencoder_lr", 0);
      tc.gate_lr = config_double(c, "gate_lr", 0);
      tc.outer_iterations = config_int(c, "outer_iterations", 0);
      tc.phase1_epochs = config_int(c, "phase1_epochs", 0);
      tc.phase2_epochs = config_int(c, "phase2_epochs", 0);
      tc.batch_size = config_int(c, "batch_size", 0);
      tc.mode = parse_mode(c.at("mode"));
      tc.ppo_epsilon = config_double(c, "ppo_epsilon", 0);
      tc.ppo_epochs = config_int(c, "ppo_epochs", 0);
      tc.clip_norm = config_double(c, "clip_norm", 0);
      tc.teacher_forcing = config_bool(c, "teacher_forcing", false);
      tc.phase1_segmentation = parse_phase1(c.at("phase1_segmentation"));
      tc.final_phase1 = config_bool(c, "final_phase1", true);
      tc.seed = train_seed;
      tc.validate();

      SsaeSystem system;
      system.gas = gas_from_checkpoint(load_checkpoint(train_gas_path));
      SsaeDims dims;
      dims.feature_dim = system.gas.feature_dim();
      dims.gas_dim = system.gas.hidden_dim();
      dims.encoder_hidden = config_int(c, "encoder_hidden", 0);
      dims.decoder_hidden = config_int(c, "decoder_hidden", 0);
      dims.gate_hidden = config_int(c, "gate_hidden", 0);
      dims.gate_layers = config_int(c, "gate_layers", 0);
      if (dims.encoder_hidden < 1 || dims.decoder_hidden < 1 || dims.gate_hidden < 1 || dims.gate_layers < 1)
        throw ConfigError("model sizes must be positive");

      const std::vector<SynthUtterance> corpus = load_corpus(train_manifest);
      std::vector<RowMatrix> gas;
      for (const auto& u : corpus) gas.push_back(extract_gas(system.gas, u.features));
      std::vector<TrainingExample> examples;
      for (std::size_t i = 0; i < corpus.size(); ++i) examples.push_back({&corpus[i].features, &gas[i]});

      std::unique_ptr<std::ofstream> log;
      if (!train_log.empty()) {
        log = std::make_unique<std::ofstream>(train_log, std::ios::trunc);
        if (!*log) throw InputError("cannot write " + train_log);
      }
      const TrainResult r = train_iterative(examples, dims, tc, {}, log.get());
      system.ssae = r.params;
      const std::uint64_t fp = save_checkpoint(train_out, ssae_checkpoint(system, c, train_seed));
      if (!r.metrics.empty()) {
        const IterationMetrics& m = r.metrics.back();
        out << "mean_reward = " << fmt(m.mean_reward) << "\nmean_nt = " << fmt(m.mean_nt) << '\n';
      }
      out << "fingerprint = " << hex(fp) << '\n';
      return 0;
    };
  });

  // segment
  auto* segment = app.add_subcommand("segment", "Segment utterances with an SSAE (greedy gate) or GAS checkpoint");
  Settings seg_set(segment);
  std::string seg_model, seg_manifest, seg_out;
  segment->add_option("--model", seg_model, "SSAE or GAS checkpoint")->required();
  segment->add_option("--manifest", seg_manifest, "Utterances to segment")->required();
  segment->add_option("--out", seg_out, "Output file, default stdout");
  seg_set.add("min_gap", std::to_string(GasSegmentOptions{}.min_gap), "GAS peak suppression distance");
  segment->callback([&] {
    action = [&] {
      const ConfigMap c = seg_set.resolve();
      const Checkpoint ck = load_checkpoint(seg_model);
      std::vector<std::pair<std::string, BoundarySet>> segs;
      const auto corpus = load_corpus(seg_manifest);
      if (ck.kind == "gas") {
        const GasModel gas = gas_from_checkpoint(ck);
        GasSegmentOptions opt;
        opt.min_gap = config_int(c, "min_gap", 0);
        for (const auto& u : corpus) segs.emplace_back(u.features.id, gas_segment(extract_gas(gas, u.features), opt));
      } else {
        const SsaeSystem system = ssae_from_checkpoint(ck);
        for (const auto& u : corpus) segs.emplace_back(u.features.id, system.segment(u.features));
      }
      write_text(seg_out, format_segmentation(segs), out);
      return 0;
    };
  });

  // embed
  auto* embed = app.add_subcommand("embed", "Build an embedding index of segmented documents");
  std::string emb_model, emb_manifest, emb_out;
  bool emb_oracle = false;
  embed->add_option("--model", emb_model, "SSAE checkpoint")->required();
  embed->add_option("--manifest", emb_manifest, "Documents")->required();
  embed->add_option("--out", emb_out, "Output index")->required();
  embed->add_flag("--oracle", emb_oracle, "Use the manifest boundaries instead of the gate");
  embed->callback([&] {
    action = [&] {
      const Loaded model = load_model(emb_model);
      const SsaeSystem system = ssae_from_checkpoint(model.checkpoint);
      EmbeddingIndex index;
      index.fingerprint = model.fingerprint;
      index.dim = system.ssae.dims.encoder_hidden;
      for (const auto& u : load_corpus(emb_manifest)) {
        IndexEntry e;
        e.id = u.features.id;
        e.boundaries = emb_oracle ? u.boundaries : system.segment(u.features);
        e.embeddings = encode_segments(system.ssae, u.features, e.boundaries);
        index.entries.push_back(std::move(e));
      }
      save_index(emb_out, index);
      out << "documents = " << index.entries.size() << '\n';
      return 0;
    };
  });

  // search
  auto* search = app.add_subcommand("search", "Rank indexed documents against a spoken query");
  std::string s_model, s_index, s_query, s_out;
  bool s_whole = false;
  search->add_option("--model", s_model, "SSAE checkpoint that built the index")->required();
  search->add_option("--index", s_index, "Embedding index")->required();
  search->add_option("--query", s_query, "Query feature file")->required();
  search->add_option("--out", s_out, "Output file, default stdout");
  search->add_flag("--whole-query", s_whole, "Embed the query as a single segment");
  search->callback([&] {
    action = [&] {
      const Loaded model = load_model(s_model);
      const EmbeddingIndex index = load_index(s_index);
      check_index_fingerprint(index, model.fingerprint);
      const SsaeSystem system = ssae_from_checkpoint(model.checkpoint);
      const FeatureMatrix q = load_features(s_query, fs::path(s_query).stem().string());
      std::ostringstream s;
      s << std::setprecision(17);
      for (const auto& r : rank(embed_query(system, q, s_whole), index))
        s << r.id << '\t' << r.match.score << '\t' << r.match.best_offset << '\n';
      write_text(s_out, s.str(), out);
      return 0;
    };
  });

  // eval-seg
  auto* eval_seg = app.add_subcommand("eval-seg", "Boundary precision, recall and F1 against reference boundaries");
  Settings eseg_set(eval_seg);
  std::string es_manifest, es_hyp;
  eval_seg->add_option("--manifest", es_manifest, "Reference manifest")->required();
  eval_seg->add_option("--hyp", es_hyp, "Segmentation file from segment")->required();
  eseg_set.add("tolerance", "4", "Boundary tolerance in frames");
  eval_seg->callback([&] {
    action = [&] {
      const ConfigMap c = eseg_set.resolve();
      const auto hyp = parse_segmentation(es_hyp);
      std::vector<BoundarySet> h, r;
      for (const auto& e : load_manifest(es_manifest)) {
        const auto it = hyp.find(e.id);
        if (it == hyp.end()) throw InputError(es_hyp + " has no segmentation for " + e.id);
        h.push_back(it->second);
        r.push_back(e.boundaries);
      }
      const PrfReport p = segmentation_prf(h, r, config_int(c, "tolerance", 0));
      out << "precision = " << fmt(p.precision) << "\nrecall = " << fmt(p.recall)
          << "\nf1 = " << fmt(p.f1) << "\nhypothesized = " << p.counts.hypothesized
          << "\nreference = " << p.counts.reference << "\nmatched = " << p.counts.matched << '\n';
      return 0;
    };
  });

  // eval-std
  auto* eval_std = app.add_subcommand("eval-std", "Query-by-example spoken term detection MAP");
  Settings estd_set(eval_std);
  std::uint64_t estd_seed = 0;
  std::string estd_model, estd_index, estd_queries, estd_docs;
  bool estd_dtw = false, estd_random = false, estd_whole = false;
  eval_std->add_option("--seed", estd_seed, "Random seed for query sampling")->required();
  eval_std->add_option("--model", estd_model, "SSAE checkpoint that built the index")->required();
  eval_std->add_option("--index", estd_index, "Embedding index of the documents")->required();
  eval_std->add_option("--queries-from", estd_queries, "Manifest to cut queries from")->required();
  eval_std->add_option("--docs", estd_docs, "Manifest of the indexed documents")->required();
  eval_std->add_flag("--dtw", estd_dtw, "Also report the frame DTW baseline");
  eval_std->add_flag("--random", estd_random, "Also report random scores");
  eval_std->add_flag("--whole-query", estd_whole, "Embed each query as a single segment");
  estd_set.add("query_words", "5", "Distinct query words");
  estd_set.add("queries_per_word", "6", "Spoken queries per word");
  eval_std->callback([&] {
    action = [&] {
      const ConfigMap c = estd_set.resolve();
      const Loaded model = load_model(estd_model);
      const EmbeddingIndex index = load_index(estd_index);
      check_index_fingerprint(index, model.fingerprint);
      const SsaeSystem system = ssae_from_checkpoint(model.checkpoint);
      const auto source = load_corpus(estd_queries);
      const auto docs = load_corpus(estd_docs);
      if (docs.size() != index.entries.size())
        throw InputError("index and document manifest list different utterances");
      std::vector<std::string> doc_ids;
      std::vector<EmbeddingSequence> doc_emb;
      for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].features.id != index.entries[i].id)
          throw InputError("index entry " + index.entries[i].id + " does not match document " + docs[i].features.id);
        doc_ids.push_back(docs[i].features.id);
        doc_emb.push_back(index.entries[i].embeddings);
      }
      Rng rng(derive_seed(estd_seed, "queries"));
      const auto queries = sample_queries(source, docs, config_int(c, "query_words", 0),
                                          config_int(c, "queries_per_word", 0), rng);
      const auto relevant = query_relevance(queries, docs);
      std::vector<EmbeddingSequence> q_emb;
      for (const auto& q : queries) q_emb.push_back(embed_query(system, q.features, estd_whole));
      const MapReport m = score_map(embedding_scores(q_emb, doc_emb), doc_ids, relevant);
      out << "queries = " << m.scored_queries << "\nmap = " << fmt(m.map) << '\n';
      for (std::size_t i = 0; i < queries.size(); ++i)
        out << "ap." << queries[i].id << " = " << fmt(m.average_precisions[i]) << '\n';
      if (estd_dtw) out << "map_dtw = " << fmt(score_map(dtw_scores(queries, docs), doc_ids, relevant).map) << '\n';
      if (estd_random) {
        Matrix s(static_cast<Eigen::Index>(queries.size()), static_cast<Eigen::Index>(docs.size()));
        Rng score_rng(derive_seed(estd_seed, "random-scores"));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = unit(score_rng);
        out << "map_random = " << fmt(score_map(s, doc_ids, relevant).map) << '\n';
      }
      return 0;
    };
  });

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference checks of every analytic gradient");
  std::uint64_t gc_seed = 0;
  double gc_tol = 1e-4;
  gradcheck->add_option("--seed", gc_seed, "Random seed")->required();
  gradcheck->add_option("--tolerance", gc_tol, "Largest accepted relative error");
  gradcheck->callback([&] {
    action = [&] {
      bool ok = true;
      for (const auto& g : run_gradchecks(gc_seed)) {
        out << g.name << ".max_relative_error = " << fmt(g.report.max_relative_error) << '\n';
        ok = ok && g.report.max_relative_error < gc_tol;
      }
      out << "status = " << (ok ? "pass" : "fail") << '\n';
      return ok ? 0 : 1;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace segaw
