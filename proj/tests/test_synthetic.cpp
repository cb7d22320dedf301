#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cseval/synthetic.hpp"

using namespace cseval;

TEST_CASE("spec validation") {
  SyntheticSpec spec;
  spec.n_items = 0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = SyntheticSpec{};
  spec.strength = 1.5;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = SyntheticSpec{};
  spec.noise = 0.6;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = SyntheticSpec{};
  spec.influencer = spec.influenced = 2;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec = SyntheticSpec{};
  spec.vocab_size = 10;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("copy target function") {
  // rebuttal (1..3) -> emotional_appeal (0/1): 1 iff rebuttal == 2
  CHECK(planted_copy_target(1, 4, 0) == 0);
  CHECK(planted_copy_target(2, 4, 0) == 1);
  CHECK(planted_copy_target(3, 4, 0) == 0);
  // binary -> ordinal: 0 -> 1, 1 -> 2
  CHECK(planted_copy_target(0, 0, 2) == 1);
  CHECK(planted_copy_target(1, 0, 2) == 2);
}

TEST_CASE("strength 1, noise 0: influenced is a function of the influencer") {
  SyntheticSpec spec;
  spec.n_items = 2000;
  spec.strength = 1.0;
  spec.noise = 0.0;
  Corpus corpus = make_planted_corpus(spec);
  REQUIRE(corpus.size() == 2000);
  for (const auto& p : corpus.pairs) {
    REQUIRE(p.labels.has_value());
    CHECK((*p.labels)[spec.influenced] ==
          planted_copy_target((*p.labels)[spec.influencer], spec.influencer,
                              spec.influenced));
  }
}

TEST_CASE("strength 0: influenced is independent of the influencer") {
  SyntheticSpec spec;
  spec.n_items = 10000;
  spec.strength = 0.0;
  spec.noise = 0.0;
  Corpus corpus = make_planted_corpus(spec);

  // Chi-square over the influencer x influenced contingency table.
  std::array<std::array<double, 2>, 3> table{};
  std::array<double, 3> row{};
  std::array<double, 2> col{};
  for (const auto& p : corpus.pairs) {
    int r = (*p.labels)[spec.influencer] - 1;
    int c = (*p.labels)[spec.influenced];
    table[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] += 1;
    row[static_cast<std::size_t>(r)] += 1;
    col[static_cast<std::size_t>(c)] += 1;
  }
  double chi2 = 0.0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 2; ++c) {
      double expected = row[static_cast<std::size_t>(r)] *
                        col[static_cast<std::size_t>(c)] / 10000.0;
      double diff = table[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -
                    expected;
      chi2 += diff * diff / expected;
    }
  }
  // df = 2; anything below 15 is comfortably consistent with independence.
  CHECK(chi2 < 15.0);
  // Marginal of the influenced dimension is near uniform.
  CHECK(col[0] / 10000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("strength 0.8: copy rate matches by generator count and by direct count") {
  SyntheticSpec spec;
  spec.n_items = 10000;
  spec.strength = 0.8;
  spec.noise = 0.0;
  SyntheticStats stats;
  Corpus corpus = make_planted_corpus(spec, Source::conan, &stats);
  double copy_rate = static_cast<double>(stats.n_copied) / 10000.0;
  CHECK(std::fabs(copy_rate - 0.8) <= 0.02);

  // Direct counting: match rate = rho + (1 - rho)/2, the non-copy draw being
  // uniform over {0,1}.
  std::size_t matches = 0;
  for (const auto& p : corpus.pairs) {
    if ((*p.labels)[spec.influenced] ==
        planted_copy_target((*p.labels)[spec.influencer], spec.influencer,
                            spec.influenced)) {
      ++matches;
    }
  }
  double rho_hat = 2.0 * (static_cast<double>(matches) / 10000.0) - 1.0;
  CHECK(std::fabs(rho_hat - 0.8) <= 0.03);
}

TEST_CASE("planted corpora parse cleanly and deterministically") {
  SyntheticSpec spec;
  spec.n_items = 200;
  Corpus corpus = make_planted_corpus(spec);
  std::ostringstream out;
  write_corpus(corpus, out);
  Corpus parsed;
  {
    std::istringstream in(out.str());
    parsed = parse_corpus_stream(in, "<memory>");
  }
  CHECK(parsed.size() == corpus.size());

  Corpus again = make_planted_corpus(spec);
  std::ostringstream out2;
  write_corpus(again, out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("influencer labels are near uniform") {
  SyntheticSpec spec;
  spec.n_items = 10000;
  spec.noise = 0.0;
  Corpus corpus = make_planted_corpus(spec);
  std::array<std::size_t, 3> counts{};
  for (const auto& p : corpus.pairs) {
    counts[static_cast<std::size_t>((*p.labels)[spec.influencer] - 1)] += 1;
  }
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(static_cast<double>(counts[c]) / 10000.0 ==
          doctest::Approx(1.0 / 3.0).epsilon(0.15));
  }
}

TEST_CASE("separable corpus is valid, labeled and deterministic") {
  Corpus corpus = make_separable_corpus(200, 96, 42);
  CHECK(corpus.size() == 200);
  CHECK(corpus.fully_labeled());
  std::ostringstream a, b;
  write_corpus(corpus, a);
  write_corpus(make_separable_corpus(200, 96, 42), b);
  CHECK(a.str() == b.str());
  std::ostringstream c;
  write_corpus(make_separable_corpus(200, 96, 7), c);
  CHECK(a.str() != c.str());

  // Every class of every dimension appears somewhere in 200 items.
  for (int d = 0; d < kNumDims; ++d) {
    const auto& dim = dimension(d);
    for (int cls = 0; cls < dim.num_classes(); ++cls) {
      bool found = false;
      for (const auto& p : corpus.pairs) {
        if ((*p.labels)[d] == dim.class_value(cls)) {
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("source tag is honored") {
  SyntheticSpec spec;
  spec.n_items = 5;
  Corpus tw = make_planted_corpus(spec, Source::twitter);
  for (const auto& p : tw.pairs) CHECK(p.source == Source::twitter);
}
