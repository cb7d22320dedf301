#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cseval/schema.hpp"

namespace cseval {

struct AnnotationRecord {
  std::string item_id;
  std::string annotator_id;
  std::string dimension;
  int value = 0;
};

// One JSON object per line with keys item_id, annotator_id, dimension, value.
std::vector<AnnotationRecord> parse_annotation_records(const std::string& path);

// items x annotators grid for one dimension; cells may be missing.
struct AnnotationTable {
  int dim_index = 0;
  std::vector<std::string> items;       // sorted lexicographically
  std::vector<std::string> annotators;  // sorted lexicographically
  std::vector<std::optional<int>> values;  // row-major items x annotators

  std::optional<int> at(std::size_t item, std::size_t annotator) const {
    return values[item * annotators.size() + annotator];
  }
  std::size_t n_ratings(std::size_t item) const;

  // At least 2 annotators, at least 1 item, all values in range.
  void validate() const;
};

AnnotationTable build_annotation_table(std::span<const AnnotationRecord> records,
                                       int dim_index);

AnnotationTable parse_annotations(const std::string& path,
                                  std::string_view dimension_name);

// Restricts the table to two annotators, keeping items where at least one of
// the pair rated.
AnnotationTable pair_subtable(const AnnotationTable& table, std::size_t a,
                              std::size_t b);

}  // namespace cseval
