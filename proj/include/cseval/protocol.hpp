#pragma once

#include <span>

#include "cseval/eval.hpp"
#include "cseval/trainer.hpp"

namespace cseval {

struct ProtocolData {
  Corpus train;
  Corpus val;
  Corpus test;
};

// Corpus assembly for a protocol, no training involved:
//   combined          merge both corpora, split train/val/test
//   conan_to_twitter  split CONAN-tagged data into train/val (fractions
//                     renormalized over train+val), test on all Twitter data
//   twitter_to_conan  the reverse
//   in_conan/in_twitter  split that single corpus
// The split seed comes from the run seed so each seed reshuffles.
ProtocolData plan_protocol(Protocol protocol, const Corpus* conan,
                           const Corpus* twitter, const SplitSpec& fractions,
                           std::uint64_t seed);

struct ProtocolRunResult {
  RunReport report;
  std::vector<ModelParameters> per_seed_params;
  std::vector<TrainHistory> per_seed_history;
};

// One full train/eval per seed.
ProtocolRunResult run_protocol(Protocol protocol, const ModelConfig& model_config,
                               const EncoderConfig& encoder_config,
                               const TrainConfig& train_config,
                               const Corpus* conan, const Corpus* twitter,
                               const SplitSpec& fractions,
                               std::span<const std::uint64_t> seeds);

}  // namespace cseval
