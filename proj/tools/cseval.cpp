#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cseval/experiment.hpp"
#include "cseval/synthetic.hpp"

namespace {

using namespace cseval;

EmitMode parse_emit(const std::string& emit) {
  if (emit == "text") return EmitMode::text;
  if (emit == "jsonl") return EmitMode::jsonl;
  if (emit == "both") return EmitMode::both;
  throw ValidationError("--emit must be text, jsonl or both");
}

int cmd_run(const std::string& config_path, const std::string& emit) {
  EmitMode mode = parse_emit(emit);
  ExperimentConfig config = load_experiment_config(config_path);
  std::string summary = run_experiment(config);
  if (mode == EmitMode::text || mode == EmitMode::both) {
    std::cout << summary;
  }
  if (mode == EmitMode::jsonl || mode == EmitMode::both) {
    for (Variant variant : config.variants) {
      std::string path = config.output_dir + "/reports/" +
                         std::string(variant_name(variant)) + "_" +
                         std::string(protocol_name(config.protocol)) + ".jsonl";
      std::ifstream in(path);
      std::cout << in.rdbuf();
    }
  }
  return 0;
}

int cmd_synth(const SyntheticSpec& spec, const std::string& out_path,
              const std::string& source, bool separable) {
  auto tag = source_from_name(source);
  if (!tag) throw ValidationError("--source must be conan or twitter");
  Corpus corpus;
  if (separable) {
    corpus = make_separable_corpus(spec.n_items, spec.vocab_size, spec.seed, *tag);
  } else {
    corpus = make_planted_corpus(spec, *tag);
  }
  write_corpus(corpus, out_path);
  std::cerr << "wrote " << corpus.size() << " pairs to " << out_path << "\n";
  return 0;
}

int cmd_iaa(const std::vector<std::string>& paths,
            const std::vector<std::string>& dims, const std::string& level,
            const std::string& emit) {
  AlphaLevel alpha_level;
  if (level == "nominal") {
    alpha_level = AlphaLevel::nominal;
  } else if (level == "ordinal") {
    alpha_level = AlphaLevel::ordinal;
  } else {
    throw ValidationError("--alpha-level must be nominal or ordinal");
  }
  std::cout << run_iaa(paths, dims, alpha_level, parse_emit(emit));
  return 0;
}

int cmd_stats(const std::vector<std::string>& paths, const std::string& baseline,
              const std::string& test, const std::string& emit) {
  TTestVariant variant;
  if (test == "student") {
    variant = TTestVariant::student;
  } else if (test == "welch") {
    variant = TTestVariant::welch;
  } else if (test == "paired") {
    variant = TTestVariant::paired;
  } else {
    throw ValidationError("--test must be student, welch or paired");
  }
  std::cout << run_stats(paths, baseline, variant, parse_emit(emit));
  return 0;
}

int cmd_split(const std::string& corpus_path, const std::string& out_dir,
              const SplitSpec& spec) {
  Corpus corpus = parse_corpus(corpus_path);
  SplitResult split = split_corpus(corpus, spec);
  write_corpus(split.train, out_dir + "/train.jsonl");
  write_corpus(split.val, out_dir + "/val.jsonl");
  write_corpus(split.test, out_dir + "/test.jsonl");
  std::cout << "train: " << split.train.size() << "\nval: " << split.val.size()
            << "\ntest: " << split.test.size() << "\n";
  return 0;
}

int cmd_inspect(const std::string& corpus_path) {
  Corpus corpus = parse_corpus(corpus_path);
  std::size_t conan = 0, twitter = 0, labeled = 0;
  std::array<std::array<std::size_t, 3>, kNumDims> hist{};
  for (const auto& pair : corpus.pairs) {
    (pair.source == Source::conan ? conan : twitter) += 1;
    if (pair.labels) {
      ++labeled;
      for (int d = 0; d < kNumDims; ++d) {
        hist[static_cast<std::size_t>(d)][static_cast<std::size_t>(
            dimension(d).class_index((*pair.labels)[d]))] += 1;
      }
    }
  }
  std::cout << "pairs: " << corpus.size() << "\nconan: " << conan
            << "\ntwitter: " << twitter << "\nlabeled: " << labeled << "\n";
  for (int d = 0; d < kNumDims; ++d) {
    const auto& dim = dimension(d);
    std::cout << dim.name << ":";
    for (int c = 0; c < dim.num_classes(); ++c) {
      std::cout << " " << dim.class_value(c) << "="
                << hist[static_cast<std::size_t>(d)][static_cast<std::size_t>(c)];
    }
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counter-speech effectiveness classification toolkit"};
  app.require_subcommand(1);

  std::string config_path, emit = "text";
  auto* run = app.add_subcommand("run", "run a full experiment from a config file");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--emit", emit, "stdout format: text|jsonl|both");

  SyntheticSpec spec;
  std::string synth_out, synth_source = "conan";
  bool separable = false;
  std::string influencer = "rebuttal", influenced = "emotional_appeal";
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--out", synth_out, "output corpus path")->required();
  synth->add_option("--items", spec.n_items, "number of pairs")->required();
  synth->add_option("--vocab", spec.vocab_size, "vocabulary size");
  synth->add_option("--influencer", influencer, "influencing dimension");
  synth->add_option("--influenced", influenced, "influenced dimension");
  synth->add_option("--strength", spec.strength, "copy probability");
  synth->add_option("--noise", spec.noise, "label noise rate");
  synth->add_option("--seed", spec.seed, "generator seed");
  synth->add_option("--source", synth_source, "source tag: conan|twitter");
  synth->add_flag("--separable", separable,
                  "emit a fully separable corpus instead of a planted one");

  std::vector<std::string> iaa_paths, iaa_dims;
  std::string alpha_level = "nominal";
  auto* iaa = app.add_subcommand("iaa", "inter-annotator agreement report");
  iaa->add_option("files", iaa_paths, "annotation files")->required();
  iaa->add_option("--dimensions", iaa_dims, "dimensions (default: all six)");
  iaa->add_option("--alpha-level", alpha_level, "nominal|ordinal");
  iaa->add_option("--emit", emit, "stdout format: text|jsonl|both");

  std::vector<std::string> stat_paths;
  std::string baseline, test_variant = "student";
  auto* stats = app.add_subcommand("stats", "significance tests over run reports");
  stats->add_option("reports", stat_paths, "report record files")->required();
  stats->add_option("--baseline", baseline, "variant to compare against")->required();
  stats->add_option("--test", test_variant, "student|welch|paired");
  stats->add_option("--emit", emit, "stdout format: text|jsonl|both");

  std::string split_corpus_path, split_out;
  SplitSpec split_spec;
  auto* split = app.add_subcommand("split", "deterministic train/val/test split");
  split->add_option("corpus", split_corpus_path, "corpus file")->required();
  split->add_option("--out-dir", split_out, "output directory")->required();
  split->add_option("--train", split_spec.train_fraction, "train fraction");
  split->add_option("--val", split_spec.val_fraction, "val fraction");
  split->add_option("--test", split_spec.test_fraction, "test fraction");
  split->add_option("--seed", split_spec.seed, "shuffle seed");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "summarize a corpus file");
  inspect->add_option("corpus", inspect_path, "corpus file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, emit);
    if (synth->parsed()) {
      int infr = cseval::dimension_index(influencer);
      int infd = cseval::dimension_index(influenced);
      if (infr < 0) throw ValidationError("unknown dimension '" + influencer + "'");
      if (infd < 0) throw ValidationError("unknown dimension '" + influenced + "'");
      spec.influencer = infr;
      spec.influenced = infd;
      return cmd_synth(spec, synth_out, synth_source, separable);
    }
    if (iaa->parsed()) return cmd_iaa(iaa_paths, iaa_dims, alpha_level, emit);
    if (stats->parsed()) return cmd_stats(stat_paths, baseline, test_variant, emit);
    if (split->parsed()) return cmd_split(split_corpus_path, split_out, split_spec);
    if (inspect->parsed()) return cmd_inspect(inspect_path);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
