#include "cseval/synthetic.hpp"

#include <algorithm>

#include "cseval/rng.hpp"

namespace cseval {

namespace {

constexpr int kGroupSize = 4;     // tokens per indicator group
constexpr int kEmitPerGroup = 3;  // tokens emitted from an active group
// The influencer spreads its signal across wide per-class pools and emits a
// single token per item, so per-token evidence is scarce; its clean
// three-way labels still pin tokens down faster than the influenced
// dimension's noisier binary labels can. The pools split whatever vocabulary
// remains after the ordinary dimensions' groups and a filler reserve.
constexpr int kEmitPerInfluencer = 1;
constexpr int kFillerPerItem = 4;
constexpr int kFillerReserve = 16;

std::string token_name(int index) { return "w" + std::to_string(index); }

std::string join_tokens(std::vector<std::string>& tokens, std::mt19937_64& rng) {
  seeded_shuffle(tokens, rng);
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

// Hands out disjoint index ranges from the vocabulary.
struct TokenBudget {
  int next = 0;
  int vocab_size;

  std::pair<int, int> take(int n) {
    if (next + n > vocab_size) {
      throw ValidationError("synthetic vocabulary too small: needs at least " +
                            std::to_string(next + n + 2 * kFillerPerItem) +
                            " tokens");
    }
    auto range = std::make_pair(next, next + n);
    next += n;
    return range;
  }
};

void emit_from_group(std::vector<std::string>& tokens, std::pair<int, int> group,
                     std::mt19937_64& rng, int n_emit = kEmitPerGroup) {
  for (int i = 0; i < n_emit; ++i) {
    int idx = group.first +
              static_cast<int>(uniform_below(
                  rng, static_cast<std::uint64_t>(group.second - group.first)));
    tokens.push_back(token_name(idx));
  }
}

int uniform_label(const DimensionSchema& dim, std::mt19937_64& rng) {
  return dim.min_value +
         static_cast<int>(uniform_below(
             rng, static_cast<std::uint64_t>(dim.num_classes())));
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_items == 0) throw ValidationError("synthetic.n_items must be positive");
  if (!(strength >= 0.0 && strength <= 1.0)) {
    throw ValidationError("synthetic.strength must lie in [0,1]");
  }
  if (!(noise >= 0.0 && noise <= 0.5)) {
    throw ValidationError("synthetic.noise must lie in [0,0.5]");
  }
  if (influencer < 0 || influencer >= kNumDims || influenced < 0 ||
      influenced >= kNumDims) {
    throw ValidationError("synthetic dependency dimensions out of range");
  }
  if (influencer == influenced) {
    throw ValidationError("synthetic influencer and influenced must differ");
  }
  if (vocab_size < 32) {
    throw ValidationError("synthetic.vocab_size too small");
  }
}

int planted_copy_target(int influencer_value, int influencer_dim,
                        int influenced_dim) {
  const auto& src = dimension(influencer_dim);
  const auto& dst = dimension(influenced_dim);
  return dst.min_value + (influencer_value - src.min_value) % dst.num_classes();
}

Corpus make_planted_corpus(const SyntheticSpec& spec, Source tag,
                           SyntheticStats* stats) {
  spec.validate();
  TokenBudget budget{0, spec.vocab_size};

  // Per-class groups for the ordinary dimensions.
  std::array<std::vector<std::pair<int, int>>, kNumDims> groups;
  for (int d = 0; d < kNumDims; ++d) {
    if (d == spec.influenced || d == spec.influencer) continue;
    for (int c = 0; c < dimension(d).num_classes(); ++c) {
      groups[static_cast<std::size_t>(d)].push_back(budget.take(kGroupSize));
    }
  }
  // Per-class groups for the influencer as well; its labels stay cleaner
  // than the influenced dimension's, which is the point of the experiment.
  std::vector<std::pair<int, int>> influencer_groups;
  {
    int classes = dimension(spec.influencer).num_classes();
    int available = spec.vocab_size - budget.next - kFillerReserve;
    int width = std::max(kGroupSize, available / classes);
    for (int c = 0; c < classes; ++c) {
      influencer_groups.push_back(budget.take(width));
    }
  }
  std::pair<int, int> filler{budget.next, spec.vocab_size};
  if (filler.second - filler.first < kFillerPerItem) {
    throw ValidationError("synthetic.vocab_size leaves no filler tokens");
  }

  std::mt19937_64 rng(spec.seed);
  Corpus corpus;
  corpus.provenance = "synthetic planted corpus seed " + std::to_string(spec.seed);

  for (std::size_t item = 0; item < spec.n_items; ++item) {
    std::vector<std::string> tokens;
    LabelVector labels;

    for (int d = 0; d < kNumDims; ++d) {
      if (d == spec.influenced || d == spec.influencer) continue;
      const auto& dim = dimension(d);
      int cls = static_cast<int>(
          uniform_below(rng, static_cast<std::uint64_t>(dim.num_classes())));
      labels[d] = dim.class_value(cls);
      emit_from_group(tokens,
                      groups[static_cast<std::size_t>(d)][static_cast<std::size_t>(cls)],
                      rng);
    }

    {
      const auto& dim = dimension(spec.influencer);
      int cls = static_cast<int>(
          uniform_below(rng, static_cast<std::uint64_t>(dim.num_classes())));
      labels[spec.influencer] = dim.class_value(cls);
      emit_from_group(tokens, influencer_groups[static_cast<std::size_t>(cls)],
                      rng, kEmitPerInfluencer);
      if (uniform01(rng) < spec.noise) {
        labels[spec.influencer] = uniform_label(dim, rng);
      }
    }

    {
      const auto& dim = dimension(spec.influenced);
      if (uniform01(rng) < spec.strength) {
        labels[spec.influenced] = planted_copy_target(
            labels[spec.influencer], spec.influencer, spec.influenced);
        if (stats) ++stats->n_copied;
      } else {
        labels[spec.influenced] = uniform_label(dim, rng);
      }
      if (uniform01(rng) < spec.noise) {
        labels[spec.influenced] = uniform_label(dim, rng);
      }
    }

    // Label noise for the ordinary dimensions.
    for (int d = 0; d < kNumDims; ++d) {
      if (d == spec.influenced || d == spec.influencer) continue;
      if (uniform01(rng) < spec.noise) {
        labels[d] = uniform_label(dimension(d), rng);
      }
    }

    for (int i = 0; i < kFillerPerItem; ++i) {
      int idx = filler.first +
                static_cast<int>(uniform_below(
                    rng, static_cast<std::uint64_t>(filler.second - filler.first)));
      tokens.push_back(token_name(idx));
    }

    HsCsPair pair;
    char id[48];
    std::snprintf(id, sizeof(id), "synth-%s-%06zu",
                  std::string(source_name(tag)).c_str(), item);
    pair.id = id;
    pair.source = tag;
    {
      std::vector<std::string> hs_tokens;
      for (int i = 0; i < 3; ++i) {
        int idx = filler.first +
                  static_cast<int>(uniform_below(
                      rng, static_cast<std::uint64_t>(filler.second - filler.first)));
        hs_tokens.push_back(token_name(idx));
      }
      pair.hs_text = join_tokens(hs_tokens, rng);
    }
    pair.cs_text = join_tokens(tokens, rng);
    pair.labels = labels;
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

Corpus make_separable_corpus(std::size_t n_items, int vocab_size,
                             std::uint64_t seed, Source tag) {
  if (n_items == 0) throw ValidationError("synthetic.n_items must be positive");
  TokenBudget budget{0, vocab_size};
  std::array<std::vector<std::pair<int, int>>, kNumDims> groups;
  for (int d = 0; d < kNumDims; ++d) {
    for (int c = 0; c < dimension(d).num_classes(); ++c) {
      groups[static_cast<std::size_t>(d)].push_back(budget.take(kGroupSize));
    }
  }
  std::pair<int, int> filler{budget.next, vocab_size};
  if (filler.second - filler.first < kFillerPerItem) {
    throw ValidationError("synthetic.vocab_size leaves no filler tokens");
  }

  std::mt19937_64 rng(seed);
  Corpus corpus;
  corpus.provenance = "synthetic separable corpus seed " + std::to_string(seed);
  for (std::size_t item = 0; item < n_items; ++item) {
    std::vector<std::string> tokens;
    LabelVector labels;
    for (int d = 0; d < kNumDims; ++d) {
      const auto& dim = dimension(d);
      int cls = static_cast<int>(
          uniform_below(rng, static_cast<std::uint64_t>(dim.num_classes())));
      labels[d] = dim.class_value(cls);
      emit_from_group(tokens,
                      groups[static_cast<std::size_t>(d)][static_cast<std::size_t>(cls)],
                      rng);
    }
    for (int i = 0; i < kFillerPerItem; ++i) {
      int idx = filler.first +
                static_cast<int>(uniform_below(
                    rng, static_cast<std::uint64_t>(filler.second - filler.first)));
      tokens.push_back(token_name(idx));
    }
    HsCsPair pair;
    char id[48];
    std::snprintf(id, sizeof(id), "synth-%s-%06zu",
                  std::string(source_name(tag)).c_str(), item);
    pair.id = id;
    pair.source = tag;
    std::vector<std::string> hs_tokens = {token_name(filler.first),
                                          token_name(filler.first + 1)};
    pair.hs_text = join_tokens(hs_tokens, rng);
    pair.cs_text = join_tokens(tokens, rng);
    pair.labels = labels;
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

}  // namespace cseval
