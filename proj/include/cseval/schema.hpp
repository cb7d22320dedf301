#pragma once

#include <array>
#include <string_view>

#include "cseval/errors.hpp"

namespace cseval {

inline constexpr int kNumDims = 6;

enum class DimKind { binary, ordinal3 };

struct DimensionSchema {
  std::string_view name;
  DimKind kind;
  int min_value;
  int max_value;

  int num_classes() const { return max_value - min_value + 1; }
  bool in_range(int v) const { return v >= min_value && v <= max_value; }
  int class_index(int v) const { return v - min_value; }
  int class_value(int index) const { return index + min_value; }
};

// Fixed dimension order; the index doubles as the task id everywhere.
const std::array<DimensionSchema, kNumDims>& schema();

// -1 when the name is unknown.
int dimension_index(std::string_view name);

const DimensionSchema& dimension(int index);

// One score per dimension, in schema order.
struct LabelVector {
  std::array<int, kNumDims> values{};

  int operator[](int i) const { return values[i]; }
  int& operator[](int i) { return values[i]; }
  bool operator==(const LabelVector&) const = default;
};

// Throws ValidationError naming the offending dimension.
void validate_labels(const LabelVector& labels);

}  // namespace cseval
