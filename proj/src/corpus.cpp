#include "cseval/corpus.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "cseval/rng.hpp"

namespace cseval {

using nlohmann::json;

std::string_view source_name(Source s) {
  return s == Source::conan ? "conan" : "twitter";
}

std::optional<Source> source_from_name(std::string_view name) {
  if (name == "conan") return Source::conan;
  if (name == "twitter") return Source::twitter;
  return std::nullopt;
}

bool Corpus::fully_labeled() const {
  for (const auto& p : pairs) {
    if (!p.labels.has_value()) return false;
  }
  return true;
}

namespace {

[[noreturn]] void fail_line(const std::string& provenance, std::size_t line,
                            const std::string& what) {
  throw ValidationError(provenance + ":" + std::to_string(line) + ": " + what);
}

LabelVector labels_from_json(const json& obj, const std::string& provenance,
                             std::size_t line) {
  LabelVector labels;
  for (int i = 0; i < kNumDims; ++i) {
    const auto& dim = dimension(i);
    auto it = obj.find(dim.name);
    if (it == obj.end()) {
      fail_line(provenance, line,
                "labels object missing dimension '" + std::string(dim.name) + "'");
    }
    if (!it->is_number_integer()) {
      fail_line(provenance, line,
                "label for dimension '" + std::string(dim.name) +
                    "' is not an integer");
    }
    int v = it->get<int>();
    if (!dim.in_range(v)) {
      fail_line(provenance, line,
                "label value " + std::to_string(v) + " out of range [" +
                    std::to_string(dim.min_value) + "," +
                    std::to_string(dim.max_value) + "] for dimension '" +
                    std::string(dim.name) + "'");
    }
    labels[i] = v;
  }
  if (obj.size() != static_cast<std::size_t>(kNumDims)) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (dimension_index(it.key()) < 0) {
        fail_line(provenance, line, "unknown dimension '" + it.key() + "' in labels");
      }
    }
  }
  return labels;
}

}  // namespace

Corpus parse_corpus_stream(std::istream& in, const std::string& provenance) {
  Corpus corpus;
  corpus.provenance = provenance;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail_line(provenance, line_no, std::string("malformed record: ") + e.what());
    }
    if (!obj.is_object()) fail_line(provenance, line_no, "record is not an object");

    HsCsPair pair;
    for (const char* key : {"id", "source", "hs_text", "cs_text"}) {
      if (!obj.contains(key) || !obj[key].is_string()) {
        fail_line(provenance, line_no,
                  std::string("missing or non-string field '") + key + "'");
      }
    }
    pair.id = obj["id"].get<std::string>();
    auto src = source_from_name(obj["source"].get<std::string>());
    if (!src) {
      fail_line(provenance, line_no,
                "unknown source tag '" + obj["source"].get<std::string>() + "'");
    }
    pair.source = *src;
    pair.hs_text = obj["hs_text"].get<std::string>();
    pair.cs_text = obj["cs_text"].get<std::string>();
    if (pair.hs_text.empty()) fail_line(provenance, line_no, "hs_text is empty");
    if (pair.cs_text.empty()) fail_line(provenance, line_no, "cs_text is empty");
    if (!seen_ids.insert(pair.id).second) {
      fail_line(provenance, line_no, "duplicate id '" + pair.id + "'");
    }
    if (obj.contains("labels") && !obj["labels"].is_null()) {
      if (!obj["labels"].is_object()) {
        fail_line(provenance, line_no, "labels is not an object");
      }
      pair.labels = labels_from_json(obj["labels"], provenance, line_no);
    }
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

Corpus parse_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus file: " + path);
  return parse_corpus_stream(in, path);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& p : corpus.pairs) {
    json obj;
    obj["id"] = p.id;
    obj["source"] = std::string(source_name(p.source));
    obj["hs_text"] = p.hs_text;
    obj["cs_text"] = p.cs_text;
    if (p.labels) {
      json labels = json::object();
      for (int i = 0; i < kNumDims; ++i) {
        labels[std::string(dimension(i).name)] = (*p.labels)[i];
      }
      obj["labels"] = labels;
    }
    out << obj.dump() << '\n';
  }
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ExecutionError("cannot write corpus file: " + path);
  write_corpus(corpus, out);
}

Corpus filter_by_source(const Corpus& corpus, Source source) {
  Corpus out;
  out.provenance = corpus.provenance + " [" + std::string(source_name(source)) + "]";
  for (const auto& p : corpus.pairs) {
    if (p.source == source) out.pairs.push_back(p);
  }
  return out;
}

Corpus merge_corpora(const Corpus& a, const Corpus& b) {
  Corpus out;
  out.provenance = a.provenance + " + " + b.provenance;
  out.pairs = a.pairs;
  out.pairs.insert(out.pairs.end(), b.pairs.begin(), b.pairs.end());
  std::unordered_set<std::string> ids;
  for (const auto& p : out.pairs) {
    if (!ids.insert(p.id).second) {
      throw ValidationError("duplicate id '" + p.id + "' when merging corpora");
    }
  }
  return out;
}

void SplitSpec::validate() const {
  for (double f : {train_fraction, val_fraction, test_fraction}) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw ValidationError("split fraction out of [0,1]");
    }
  }
  double sum = train_fraction + val_fraction + test_fraction;
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1 (got " +
                          std::to_string(sum) + ")");
  }
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec) {
  spec.validate();
  // The epsilon keeps exact fractions (e.g. 0.7 of 10) from landing just
  // below the integer they represent.
  auto frac = [n](double f) {
    return static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * f + 1e-9));
  };
  std::size_t train = frac(spec.train_fraction);
  std::size_t val = frac(spec.val_fraction);
  return {train, val, n - train - val};
}

SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec) {
  spec.validate();
  if (corpus.pairs.empty()) {
    throw ValidationError("cannot split an empty corpus");
  }
  const std::size_t n = corpus.pairs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(spec.seed);
  seeded_shuffle(order, rng);

  auto sizes = split_sizes(n, spec);
  SplitResult result;
  result.train.provenance = corpus.provenance + " [train]";
  result.val.provenance = corpus.provenance + " [val]";
  result.test.provenance = corpus.provenance + " [test]";
  std::size_t pos = 0;
  Corpus* slices[3] = {&result.train, &result.val, &result.test};
  for (int s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < sizes[static_cast<std::size_t>(s)]; ++i, ++pos) {
      slices[s]->pairs.push_back(corpus.pairs[order[pos]]);
    }
  }
  return result;
}

}  // namespace cseval
