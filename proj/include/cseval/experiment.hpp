#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cseval/agreement.hpp"
#include "cseval/protocol.hpp"
#include "cseval/stats.hpp"

namespace cseval {

enum class EmitMode { text, jsonl, both };

// One config file drives a whole run; see docs/formats.md.
struct ExperimentConfig {
  std::optional<std::string> conan_path;
  std::optional<std::string> twitter_path;
  std::optional<std::string> combined_path;
  Protocol protocol = Protocol::combined;
  std::vector<Variant> variants = {
      Variant::independent, Variant::multitask_divided,
      Variant::multitask_united, Variant::dependency_matrix};
  std::vector<std::uint64_t> seeds = {42, 0, 1, 2, 3};
  EncoderConfig encoder;
  ModelConfig model;
  TrainConfig train;
  SplitSpec split;
  std::string output_dir = "out";

  void validate() const;
};

// Relative paths inside the config resolve against the config file's
// directory.
ExperimentConfig load_experiment_config(const std::string& path);

// Executes every (variant, seed) job, writes reports/, checkpoints/,
// matrices/ and logs/ under output_dir, and returns the human-readable
// summary (also written to reports/summary.txt).
std::string run_experiment(const ExperimentConfig& config);

// Panel + pairwise agreement for the requested dimensions over pooled
// annotation files.
std::string run_iaa(const std::vector<std::string>& annotation_paths,
                    const std::vector<std::string>& dimensions,
                    AlphaLevel level, EmitMode emit);

// ANOVA across variants plus pairwise t-tests against the baseline, over
// per-seed macro averages parsed from report records.
std::string run_stats(const std::vector<std::string>& report_paths,
                      const std::string& baseline, TTestVariant variant,
                      EmitMode emit);

}  // namespace cseval
