#include "cseval/annotations.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

namespace cseval {

using nlohmann::json;

std::vector<AnnotationRecord> parse_annotation_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open annotation file: " + path);
  std::vector<AnnotationRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": malformed record: " + e.what());
    }
    AnnotationRecord rec;
    for (const char* key : {"item_id", "annotator_id", "dimension"}) {
      if (!obj.contains(key) || !obj[key].is_string()) {
        throw ValidationError(path + ":" + std::to_string(line_no) +
                              ": missing or non-string field '" + key + "'");
      }
    }
    rec.item_id = obj["item_id"].get<std::string>();
    rec.annotator_id = obj["annotator_id"].get<std::string>();
    rec.dimension = obj["dimension"].get<std::string>();
    if (!obj.contains("value") || !obj["value"].is_number_integer()) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": missing or non-integer field 'value'");
    }
    rec.value = obj["value"].get<int>();
    int dim = dimension_index(rec.dimension);
    if (dim < 0) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": unknown dimension '" + rec.dimension + "'");
    }
    if (!dimension(dim).in_range(rec.value)) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": value " +
                            std::to_string(rec.value) +
                            " out of range for dimension '" + rec.dimension +
                            "' (item " + rec.item_id + ", annotator " +
                            rec.annotator_id + ")");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::size_t AnnotationTable::n_ratings(std::size_t item) const {
  std::size_t n = 0;
  for (std::size_t a = 0; a < annotators.size(); ++a) {
    if (at(item, a).has_value()) ++n;
  }
  return n;
}

void AnnotationTable::validate() const {
  if (annotators.size() < 2) {
    throw ValidationError("annotation table needs at least 2 annotators (got " +
                          std::to_string(annotators.size()) + ")");
  }
  if (items.empty()) {
    throw ValidationError("annotation table has no items");
  }
  const auto& dim = dimension(dim_index);
  for (const auto& v : values) {
    if (v && !dim.in_range(*v)) {
      throw ValidationError("annotation value " + std::to_string(*v) +
                            " out of range for dimension '" +
                            std::string(dim.name) + "'");
    }
  }
}

AnnotationTable build_annotation_table(std::span<const AnnotationRecord> records,
                                       int dim_index) {
  const auto& dim = dimension(dim_index);
  std::set<std::string> item_set, annotator_set;
  for (const auto& rec : records) {
    if (rec.dimension != dim.name) continue;
    item_set.insert(rec.item_id);
    annotator_set.insert(rec.annotator_id);
  }
  AnnotationTable table;
  table.dim_index = dim_index;
  table.items.assign(item_set.begin(), item_set.end());
  table.annotators.assign(annotator_set.begin(), annotator_set.end());
  table.values.assign(table.items.size() * table.annotators.size(), std::nullopt);

  auto item_pos = [&](const std::string& id) {
    return static_cast<std::size_t>(
        std::lower_bound(table.items.begin(), table.items.end(), id) -
        table.items.begin());
  };
  auto annotator_pos = [&](const std::string& id) {
    return static_cast<std::size_t>(
        std::lower_bound(table.annotators.begin(), table.annotators.end(), id) -
        table.annotators.begin());
  };

  for (const auto& rec : records) {
    if (rec.dimension != dim.name) continue;
    std::size_t i = item_pos(rec.item_id);
    std::size_t a = annotator_pos(rec.annotator_id);
    auto& cell = table.values[i * table.annotators.size() + a];
    if (cell.has_value()) {
      throw ValidationError("duplicate annotation cell for (" + rec.item_id +
                            ", " + rec.annotator_id + ") in dimension '" +
                            rec.dimension + "'");
    }
    cell = rec.value;
  }
  table.validate();
  return table;
}

AnnotationTable parse_annotations(const std::string& path,
                                  std::string_view dimension_name) {
  int dim = dimension_index(dimension_name);
  if (dim < 0) {
    throw ValidationError("unknown dimension '" + std::string(dimension_name) + "'");
  }
  auto records = parse_annotation_records(path);
  return build_annotation_table(records, dim);
}

AnnotationTable pair_subtable(const AnnotationTable& table, std::size_t a,
                              std::size_t b) {
  AnnotationTable sub;
  sub.dim_index = table.dim_index;
  sub.annotators = {table.annotators[a], table.annotators[b]};
  std::sort(sub.annotators.begin(), sub.annotators.end());
  bool swapped = sub.annotators[0] != table.annotators[a];
  for (std::size_t i = 0; i < table.items.size(); ++i) {
    auto va = table.at(i, a);
    auto vb = table.at(i, b);
    if (!va && !vb) continue;
    sub.items.push_back(table.items[i]);
    if (swapped) std::swap(va, vb);
    sub.values.push_back(va);
    sub.values.push_back(vb);
  }
  sub.validate();
  return sub;
}

}  // namespace cseval
