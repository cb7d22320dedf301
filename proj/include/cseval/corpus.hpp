#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cseval/schema.hpp"

namespace cseval {

enum class Source { conan, twitter };

std::string_view source_name(Source s);
std::optional<Source> source_from_name(std::string_view name);

struct HsCsPair {
  std::string id;
  Source source = Source::conan;
  std::string hs_text;
  std::string cs_text;
  std::optional<LabelVector> labels;
};

struct Corpus {
  std::vector<HsCsPair> pairs;
  std::string provenance;

  std::size_t size() const { return pairs.size(); }
  bool fully_labeled() const;
};

// One JSON object per line; see docs/formats.md for the grammar. Ingestion
// order is preserved, which anchors deterministic splitting.
Corpus parse_corpus(const std::string& path);
Corpus parse_corpus_stream(std::istream& in, const std::string& provenance);

void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus(const Corpus& corpus, const std::string& path);

Corpus filter_by_source(const Corpus& corpus, Source source);

// Concatenates in argument order; ids must stay unique.
Corpus merge_corpora(const Corpus& a, const Corpus& b);

struct SplitSpec {
  double train_fraction = 0.7;
  double val_fraction = 0.1;
  double test_fraction = 0.2;
  std::uint64_t seed = 42;

  void validate() const;  // fractions must sum to 1 within 1e-9
};

struct SplitResult {
  Corpus train;
  Corpus val;
  Corpus test;
};

// |train| = floor(n*train_fraction), |val| = floor(n*val_fraction),
// remainder to test.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec);

// Seeded Fisher-Yates over ingestion order, then sliced. Same (corpus, spec)
// always yields identical member ids.
SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec);

}  // namespace cseval
