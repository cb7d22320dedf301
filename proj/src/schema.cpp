#include "cseval/schema.hpp"

#include <string>

namespace cseval {

const std::array<DimensionSchema, kNumDims>& schema() {
  static const std::array<DimensionSchema, kNumDims> dims = {{
      {"emotional_appeal", DimKind::binary, 0, 1},
      {"audience_adaptation", DimKind::binary, 0, 1},
      {"clarity", DimKind::ordinal3, 1, 3},
      {"evidence", DimKind::ordinal3, 1, 3},
      {"rebuttal", DimKind::ordinal3, 1, 3},
      {"fairness", DimKind::ordinal3, 1, 3},
  }};
  return dims;
}

int dimension_index(std::string_view name) {
  const auto& dims = schema();
  for (int i = 0; i < kNumDims; ++i) {
    if (dims[i].name == name) return i;
  }
  return -1;
}

const DimensionSchema& dimension(int index) {
  return schema().at(static_cast<std::size_t>(index));
}

void validate_labels(const LabelVector& labels) {
  for (int i = 0; i < kNumDims; ++i) {
    const auto& dim = dimension(i);
    if (!dim.in_range(labels[i])) {
      throw ValidationError("label value " + std::to_string(labels[i]) +
                            " out of range [" + std::to_string(dim.min_value) +
                            "," + std::to_string(dim.max_value) +
                            "] for dimension " + std::string(dim.name));
    }
  }
}

}  // namespace cseval
