#include "cseval/protocol.hpp"

namespace cseval {

namespace {

const Corpus& require(const Corpus* corpus, const char* which, Protocol p) {
  if (!corpus) {
    throw ValidationError("protocol " + std::string(protocol_name(p)) +
                          " requires the " + which + " corpus");
  }
  return *corpus;
}

// Split a source corpus into train/val only, renormalizing the fractions so
// the whole corpus is used; the floor remainder lands in val.
ProtocolData cross_domain(const Corpus& source, const Corpus& target,
                          const SplitSpec& fractions, std::uint64_t seed) {
  double tv = fractions.train_fraction + fractions.val_fraction;
  if (tv <= 0.0) {
    throw ValidationError("cross-domain protocol needs a nonzero train+val fraction");
  }
  SplitSpec spec;
  spec.train_fraction = fractions.train_fraction / tv;
  spec.val_fraction = 0.0;
  spec.test_fraction = 1.0 - spec.train_fraction;
  spec.seed = seed;
  SplitResult split = split_corpus(source, spec);
  ProtocolData data;
  data.train = std::move(split.train);
  data.val = std::move(split.test);
  data.val.provenance = source.provenance + " [val]";
  data.test = target;
  return data;
}

}  // namespace

ProtocolData plan_protocol(Protocol protocol, const Corpus* conan,
                           const Corpus* twitter, const SplitSpec& fractions,
                           std::uint64_t seed) {
  fractions.validate();
  SplitSpec spec = fractions;
  spec.seed = seed;
  switch (protocol) {
    case Protocol::combined: {
      Corpus merged = merge_corpora(require(conan, "conan", protocol),
                                    require(twitter, "twitter", protocol));
      SplitResult split = split_corpus(merged, spec);
      return {std::move(split.train), std::move(split.val), std::move(split.test)};
    }
    case Protocol::conan_to_twitter:
      return cross_domain(require(conan, "conan", protocol),
                          require(twitter, "twitter", protocol), fractions, seed);
    case Protocol::twitter_to_conan:
      return cross_domain(require(twitter, "twitter", protocol),
                          require(conan, "conan", protocol), fractions, seed);
    case Protocol::in_twitter: {
      SplitResult split = split_corpus(require(twitter, "twitter", protocol), spec);
      return {std::move(split.train), std::move(split.val), std::move(split.test)};
    }
    case Protocol::in_conan: {
      SplitResult split = split_corpus(require(conan, "conan", protocol), spec);
      return {std::move(split.train), std::move(split.val), std::move(split.test)};
    }
  }
  throw ValidationError("unknown protocol");
}

ProtocolRunResult run_protocol(Protocol protocol, const ModelConfig& model_config,
                               const EncoderConfig& encoder_config,
                               const TrainConfig& train_config,
                               const Corpus* conan, const Corpus* twitter,
                               const SplitSpec& fractions,
                               std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) {
    throw ValidationError("run_protocol needs at least one seed");
  }
  ProtocolRunResult result;
  result.report.variant = model_config.variant;
  result.report.protocol = protocol;
  result.report.input_mode = encoder_config.input_mode;

  for (std::uint64_t seed : seeds) {
    ProtocolData data = plan_protocol(protocol, conan, twitter, fractions, seed);
    if (data.test.pairs.empty()) {
      throw ValidationError("protocol " + std::string(protocol_name(protocol)) +
                            " produced an empty test set");
    }
    TrainConfig tc = train_config;
    tc.seed = seed;
    tc.epochs = model_config.epochs;
    TrainResult trained = train(model_config, encoder_config, data.train,
                                data.val, tc);

    std::vector<LabelVector> gold;
    for (const auto& pair : data.test.pairs) {
      if (!pair.labels) {
        throw ValidationError("test pair '" + pair.id + "' has no labels");
      }
      gold.push_back(*pair.labels);
    }
    auto preds = predict_corpus(trained.params, encoder_config, data.test);

    SeedScores run;
    run.seed = seed;
    run.weighted = score_dimensions(preds, gold, Averaging::weighted);
    run.macro_cls = score_dimensions(preds, gold, Averaging::macro_classes);
    for (int t = 0; t < 2; ++t) {
      std::vector<int> p(preds.size()), g(gold.size());
      for (std::size_t i = 0; i < preds.size(); ++i) {
        p[i] = preds[i][t];
        g[i] = gold[i][t];
      }
      run.positive[static_cast<std::size_t>(t)] =
          f1_dimension(p, g, DimKind::binary, Averaging::positive_class);
    }
    result.report.runs.push_back(run);
    result.per_seed_params.push_back(std::move(trained.params));
    result.per_seed_history.push_back(std::move(trained.history));
  }
  return result;
}

}  // namespace cseval
