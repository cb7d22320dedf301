#pragma once

#include <string>
#include <vector>

#include "cseval/annotations.hpp"

namespace cseval {

enum class AlphaLevel { nominal, ordinal };

struct AgreementReport {
  std::string dimension;
  std::string metric;  // fleiss_kappa | krippendorff_alpha | percent_agreement
  double value = 0.0;
  std::size_t n_items = 0;       // items retained (>= 2 ratings)
  std::size_t n_annotators = 0;
  std::size_t n_missing = 0;     // items dropped for having < 2 ratings
  bool degenerate = false;       // no-variation table, value forced to 1.0
};

// Chance-corrected multi-rater agreement; items may have unequal rater
// counts. Items with fewer than two ratings are dropped and counted.
AgreementReport fleiss_kappa(const AnnotationTable& table);

// 1 - D_o/D_e over the coincidence matrix; missing cells are handled by the
// construction itself.
AgreementReport krippendorff_alpha(const AnnotationTable& table,
                                   AlphaLevel level = AlphaLevel::nominal);

// Fraction of retained items on which every present rater agrees.
AgreementReport percent_agreement(const AnnotationTable& table);

// The metric used for a dimension in panel and pairwise reporting:
// percent agreement for audience_adaptation, Fleiss kappa for the other
// binary dimension, Krippendorff alpha for the ordinal ones.
AgreementReport designated_metric(const AnnotationTable& table,
                                  AlphaLevel level = AlphaLevel::nominal);

struct PairwiseReport {
  std::string annotator_a;
  std::string annotator_b;
  AgreementReport report;
};

// One report per unordered annotator pair, computed on the 2-rater subtable.
std::vector<PairwiseReport> pairwise_reports(const AnnotationTable& table,
                                             AlphaLevel level = AlphaLevel::nominal);

}  // namespace cseval
