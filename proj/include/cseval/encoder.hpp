#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cseval/corpus.hpp"

namespace cseval {

enum class InputMode { cs_only, cs_plus_hs };

std::string_view input_mode_name(InputMode m);

struct EncoderConfig {
  int max_tokens = 128;
  int feature_dim = 4096;
  std::set<int> ngram_orders = {1, 2};
  InputMode input_mode = InputMode::cs_only;

  void validate() const;
};

// Sparse, L2-normalized. Kept sparse because a 128-token window touches a
// few hundred indices at most.
struct FeatureVector {
  int dim = 0;
  std::vector<std::pair<int, double>> entries;  // sorted by index

  double norm() const;
  std::vector<double> dense() const;
};

// Lowercased (ASCII), Unicode-whitespace- and punctuation-delimited tokens,
// truncated to max_tokens. Empty text yields an empty list.
std::vector<std::string> tokenize(std::string_view text, int max_tokens);

// Signed feature hashing over token n-grams. In cs_plus_hs mode the stream is
// hs tokens, a separator, then cs tokens, truncated as one window; n-grams
// touching the separator are never hashed, and no separator is inserted when
// hs contributes no tokens.
FeatureVector encode(const HsCsPair& pair, const EncoderConfig& config);

// Hash index and sign for a single n-gram; exposed for distribution tests.
std::uint64_t ngram_hash(std::span<const std::string> tokens);
int ngram_sign(std::uint64_t hash);

}  // namespace cseval
