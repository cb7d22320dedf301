#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cseval/model.hpp"
#include "cseval/schema.hpp"

namespace cseval {

enum class Averaging { weighted, macro_classes, positive_class };

std::string_view averaging_name(Averaging a);

// Per-class precision/recall/F1 from the confusion matrix. weighted is the
// support-weighted mean over classes present in gold; macro_classes the
// unweighted mean over those classes; positive_class the F1 of class 1
// (binary dimensions only).
double f1_dimension(std::span<const int> preds, std::span<const int> gold,
                    DimKind kind, Averaging averaging = Averaging::weighted);

struct DimensionScores {
  std::array<double, kNumDims> f1{};
  double macro_avg = 0.0;  // arithmetic mean of the six
};

DimensionScores score_dimensions(std::span<const LabelVector> preds,
                                 std::span<const LabelVector> gold,
                                 Averaging averaging = Averaging::weighted);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (n-1) standard deviation
  bool single_run = false;
};

MeanStd aggregate_runs(std::span<const double> per_seed);

// "0.96 ± 0.01" (rounding happens only here, at presentation).
std::string format_mean_std(const MeanStd& ms);

enum class Protocol {
  combined,
  conan_to_twitter,
  twitter_to_conan,
  in_twitter,
  in_conan,
};

std::string_view protocol_name(Protocol p);
std::optional<Protocol> protocol_from_name(std::string_view name);

struct SeedScores {
  std::uint64_t seed = 0;
  DimensionScores weighted;
  DimensionScores macro_cls;
  std::array<double, 2> positive{};  // binary dimensions only
};

struct RunReport {
  Variant variant = Variant::multitask_united;
  Protocol protocol = Protocol::combined;
  InputMode input_mode = InputMode::cs_only;
  std::vector<SeedScores> runs;
};

struct AggregateScores {
  std::array<MeanStd, kNumDims> f1;
  MeanStd macro_avg;
};

AggregateScores aggregate_report(const RunReport& report,
                                 Averaging averaging = Averaging::weighted);

std::vector<double> per_seed_macro(const RunReport& report,
                                   Averaging averaging = Averaging::weighted);

// One seed_scores record per (variant, protocol, seed) plus one aggregate
// record, as JSON lines.
std::string report_to_records(const RunReport& report);
std::vector<RunReport> parse_run_reports(const std::string& path);

// Plain-text grid: one row per variant, one column per dimension plus the
// macro average.
std::string format_report_grid(std::span<const RunReport> reports,
                               Averaging averaging = Averaging::weighted);

}  // namespace cseval
