// src/pipeline/experiment.cc

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

#include "segaw/pipeline/experiment.h"

#include <sstream>

namespace segaw {

ExperimentConfig desk_experiment_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.synth.seed = seed;
  c.gas.hidden_dim = 32;
  c.gas.epochs = 10;
  c.gas.learning_rate = 3e-3;
  c.gas.seed = seed;
  c.dims.feature_dim = c.synth.dim;
  c.dims.gas_dim = c.gas.hidden_dim;
  c.dims.encoder_hidden = 32;
  c.dims.decoder_hidden = 32;
  c.dims.gate_hidden = 32;
  c.dims.gate_layers = 1;
  c.train.lambda = 500.0;
  c.train.outer_iterations = 6;
  c.train.phase1_epochs = 15;
  c.train.phase2_epochs = 3;
  c.train.gate_lr = 2e-3;
  c.train.seed = seed;
  return c;
}

namespace {

double mean_nt(const std::vector<BoundarySet>& b) {
  double s = 0.0;
  for (const auto& x : b) s += static_cast<double>(x.num_segments()) / x.num_frames();
  return b.empty() ? 0.0 : s / static_cast<double>(b.size());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentLog& log) {
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  if (config.dims.feature_dim != config.synth.dim || config.dims.gas_dim != config.gas.hidden_dim)
    throw ConfigError("experiment dims disagree with the corpus or GAS configuration");
  ExperimentResult result;
  const SynthCorpus corpus = generate_corpus(config.synth);
  const auto& train = corpus.train;
  const auto& test = corpus.test;
  result.word_rate = word_rate(train);

  std::vector<FeatureMatrix> train_features;
  for (const auto& u : train) train_features.push_back(u.features);
  result.system.gas = train_gas_autoencoder(train_features, config.gas).model;
  std::vector<RowMatrix> train_gas, test_gas;
  for (const auto& u : train) train_gas.push_back(extract_gas(result.system.gas, u.features));
  for (const auto& u : test) test_gas.push_back(extract_gas(result.system.gas, u.features));

  std::vector<BoundarySet> reference, gas_hyp, random_hyp;
  Rng random_rng(derive_seed(config.synth.seed, "random-baseline"));
  for (std::size_t i = 0; i < test.size(); ++i) {
    reference.push_back(test[i].boundaries);
    gas_hyp.push_back(gas_segment(test_gas[i]));
    random_hyp.push_back(
        random_segment(test[i].features.num_frames(), result.word_rate, random_rng));
  }
  result.gas_prf = segmentation_prf(gas_hyp, reference, config.tolerance);
  result.random_prf = segmentation_prf(random_hyp, reference, config.tolerance);
  {
    std::ostringstream s;
    s << "word_rate = " << result.word_rate << "\ngas_f1 = " << result.gas_prf.f1
      << "\nrandom_f1 = " << result.random_prf.f1;
    say(s.str());
  }

  std::vector<TrainingExample> examples;
  for (std::size_t i = 0; i < train.size(); ++i)
    examples.push_back({&train[i].features, &train_gas[i]});
  TrainObserver observer;
  observer.on_iteration_end = [&](const IterationMetrics& m, const SsaeParams& p) {
    std::vector<BoundarySet> hyp;
    for (std::size_t i = 0; i < test.size(); ++i)
      hyp.push_back(actions_to_boundaries(
          rollout(p, test[i].features, test_gas[i], DecodeMode::kGreedy).actions));
    IterationReport r;
    r.iteration = m.iteration;
    r.sampled_nt = m.mean_nt;
    r.greedy_nt = mean_nt(hyp);
    r.prf = segmentation_prf(hyp, reference, config.tolerance);
    result.iterations.push_back(r);
    std::ostringstream s;
    s << "iteration " << r.iteration << ": sampled_nt = " << r.sampled_nt
      << " greedy_nt = " << r.greedy_nt << " f1 = " << r.prf.f1;
    say(s.str());
  };
  result.system.ssae = train_iterative(examples, config.dims, config.train, observer).params;

  std::vector<BoundarySet> ssae_hyp;
  std::vector<EmbeddingSequence> ssae_docs;
  for (std::size_t i = 0; i < test.size(); ++i) {
    ssae_hyp.push_back(actions_to_boundaries(
        rollout(result.system.ssae, test[i].features, test_gas[i], DecodeMode::kGreedy).actions));
    ssae_docs.push_back(encode_segments(result.system.ssae, test[i].features, ssae_hyp.back()));
  }
  result.ssae_prf = segmentation_prf(ssae_hyp, reference, config.tolerance);

  // Oracle: autoencoder trained on reference boundaries.
  AutoencoderParams oracle;
  {
    Rng init(derive_seed(config.synth.seed, "oracle-init"));
    oracle = AutoencoderParams::initialized(config.dims, init);
    AdamConfig adam;
    adam.learning_rate = config.train.autoencoder_lr;
    AdamState state(param_list(oracle), adam);
    Rng rng(derive_seed(config.synth.seed, "oracle-train"));
    std::vector<BoundarySet> train_ref;
    for (const auto& u : train) train_ref.push_back(u.boundaries);
    train_autoencoder_fixed(oracle, examples, train_ref, config.train, config.oracle_epochs,
                            state, rng);
  }
  std::vector<EmbeddingSequence> oracle_docs;
  for (const auto& u : test) oracle_docs.push_back(encode_segments(oracle, u.features, u.boundaries));

  Rng query_rng(derive_seed(config.synth.seed, "queries"));
  const std::vector<StdQuery> queries =
      sample_queries(train, test, config.query_words, config.queries_per_word, query_rng);
  const auto relevant = query_relevance(queries, test);
  std::vector<std::string> doc_ids;
  for (const auto& u : test) doc_ids.push_back(u.features.id);

  std::vector<EmbeddingSequence> ssae_queries, oracle_queries;
  for (const auto& q : queries) {
    ssae_queries.push_back(result.system.embed(q.features).embeddings);
    oracle_queries.push_back(encode_segments(
        oracle, q.features, BoundarySet::whole(q.features.num_frames())));
  }
  result.map_ssae = score_map(embedding_scores(ssae_queries, ssae_docs), doc_ids, relevant).map;
  result.map_oracle =
      score_map(embedding_scores(oracle_queries, oracle_docs), doc_ids, relevant).map;
  result.map_dtw = score_map(dtw_scores(queries, test), doc_ids, relevant).map;
  Matrix random_scores(static_cast<Eigen::Index>(queries.size()),
                       static_cast<Eigen::Index>(test.size()));
  Rng score_rng(derive_seed(config.synth.seed, "random-scores"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index i = 0; i < random_scores.size(); ++i) random_scores(i) = unit(score_rng);
  result.map_random = score_map(random_scores, doc_ids, relevant).map;
  {
    std::ostringstream s;
    s << "ssae_f1 = " << result.ssae_prf.f1 << "\nmap_ssae = " << result.map_ssae
      << "\nmap_oracle = " << result.map_oracle << "\nmap_dtw = " << result.map_dtw
      << "\nmap_random = " << result.map_random;
    say(s.str());
  }
  return result;
}

}  // namespace segaw
