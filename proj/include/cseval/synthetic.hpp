#pragma once

#include <cstdint>

#include "cseval/corpus.hpp"

namespace cseval {

// Planted-dependency corpus. Every dimension except the influenced one gets
// indicator tokens that determine its label; the influenced dimension gets no
// tokens of its own and copies a deterministic function of the influencer's
// label with probability `strength`, drawing uniformly otherwise.
//
// The influencer uses a two-bit token scheme when ordinal (latent bits a, b
// with label 1+a+b, one token group per bit), so the copy target
// (label == 2, i.e. a XOR b) is not linearly separable in token space while
// the influencer's own label is. Label noise replaces a final label with a
// uniform draw.
struct SyntheticSpec {
  std::size_t n_items = 1000;
  int vocab_size = 200;
  int influencer = 4;   // rebuttal
  int influenced = 0;   // emotional_appeal
  double strength = 0.9;  // copy probability
  double noise = 0.05;
  std::uint64_t seed = 42;

  void validate() const;
};

// f(v) = influenced_min + ((v - influencer_min) mod n_influenced_classes);
// for rebuttal -> emotional_appeal this is 1 iff rebuttal == 2.
int planted_copy_target(int influencer_value, int influencer_dim,
                        int influenced_dim);

struct SyntheticStats {
  std::size_t n_copied = 0;  // items whose influenced label was copied
};

Corpus make_planted_corpus(const SyntheticSpec& spec,
                           Source tag = Source::conan,
                           SyntheticStats* stats = nullptr);

// Fully separable corpus: every dimension's label is determined by its own
// indicator tokens, no planting, no noise.
Corpus make_separable_corpus(std::size_t n_items, int vocab_size,
                             std::uint64_t seed, Source tag = Source::conan);

}  // namespace cseval
