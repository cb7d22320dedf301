#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cseval/rng.hpp"
#include "cseval/synthetic.hpp"
#include "cseval/trainer.hpp"

using namespace cseval;

namespace {

EncoderConfig small_encoder(InputMode mode = InputMode::cs_only) {
  EncoderConfig e;
  e.max_tokens = 16;
  e.feature_dim = 16;
  e.input_mode = mode;
  return e;
}

ModelConfig small_model(Variant variant) {
  ModelConfig m;
  m.variant = variant;
  m.hidden_dim = 8;
  m.task_embed_dim = 4;
  m.epochs = 1;
  return m;
}

std::vector<TrainSample> small_batch(InputMode mode, std::size_t n = 6,
                                     std::uint64_t seed = 123) {
  Corpus corpus = make_separable_corpus(n, 96, seed);
  return encode_corpus(corpus, small_encoder(mode));
}

bool params_equal(const ModelParameters& a, const ModelParameters& b) {
  auto ta = tensor_list(a);
  auto tb = tensor_list(b);
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i]->v != tb[i]->v) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("gradient check passes for all variants and input modes") {
  for (Variant variant : {Variant::independent, Variant::multitask_divided,
                          Variant::multitask_united, Variant::dependency_matrix}) {
    for (InputMode mode : {InputMode::cs_only, InputMode::cs_plus_hs}) {
      CAPTURE(variant_name(variant));
      CAPTURE(input_mode_name(mode));
      auto batch = small_batch(mode);
      ModelParameters params =
          init_parameters(small_model(variant), 16, /*seed=*/2024);
      GradientCheckResult result = gradient_check(params, batch, 1e-5, 99);
      CHECK(result.max_rel_error < 1e-4);
      CHECK(result.n_checked >= 200);
      CHECK(result.n_dep_params >= 10);
    }
  }
}

TEST_CASE("gradient check exercises focal alpha weights") {
  auto batch = small_batch(InputMode::cs_only);
  ModelParameters params =
      init_parameters(small_model(Variant::multitask_united), 16, 7);
  params.focal_alpha = inverse_frequency_alpha(batch);
  GradientCheckResult result = gradient_check(params, batch, 1e-5, 5);
  CHECK(result.max_rel_error < 1e-4);
}

TEST_CASE("gradient check detects a corrupted gradient") {
  auto batch = small_batch(InputMode::cs_only);
  ModelParameters params =
      init_parameters(small_model(Variant::multitask_united), 16, 11);
  GradientCheckResult result =
      gradient_check(params, batch, 1e-5, 99, /*self_test_corruption=*/true);
  CHECK(result.max_rel_error > 0.5);
}

TEST_CASE("gradient check validates epsilon") {
  auto batch = small_batch(InputMode::cs_only);
  ModelParameters params =
      init_parameters(small_model(Variant::multitask_united), 16, 11);
  CHECK_THROWS_AS(gradient_check(params, batch, 1e-2, 1), ValidationError);
}

TEST_CASE("dep_raw row gradient vanishes when that task's V is zero") {
  auto batch = small_batch(InputMode::cs_only);
  ModelParameters params =
      init_parameters(small_model(Variant::dependency_matrix), 16, 3);
  params.task_v[0].zero();
  auto groups = loss_schedule(Variant::dependency_matrix);
  GradientSet grads = backward(params, batch, groups[0]);
  const Tensor& dg = grads.tensors[grads.tensors.size() - 1];  // dep_raw last
  for (int j = 0; j < kNumDims; ++j) {
    CHECK(dg.at(0, static_cast<std::size_t>(j)) == 0.0);
  }
  // Other rows receive gradient.
  double other = 0.0;
  for (int t = 1; t < kNumDims; ++t) {
    for (int j = 0; j < kNumDims; ++j) {
      other += std::fabs(dg.at(static_cast<std::size_t>(t),
                               static_cast<std::size_t>(j)));
    }
  }
  CHECK(other > 0.0);
}

TEST_CASE("zero learning-rate step leaves parameters unchanged") {
  auto batch = small_batch(InputMode::cs_only);
  ModelParameters params =
      init_parameters(small_model(Variant::multitask_united), 16, 3);
  ModelParameters before = params;
  GradientSet grads = backward(params, batch, loss_schedule(params.config.variant)[0]);
  sgd_step(params, grads, 0.0);
  CHECK(params_equal(params, before));
}

TEST_CASE("adam: zero gradient from fresh state changes nothing") {
  ModelParameters params =
      init_parameters(small_model(Variant::multitask_united), 16, 3);
  ModelParameters before = params;
  GradientSet grads;
  for (const Tensor* t : tensor_list(params)) {
    grads.tensors.emplace_back(t->rows, t->cols);
  }
  grads.touched.assign(grads.tensors.size(), 1);
  AdamState state = make_adam_state(params);
  TrainConfig config;
  adam_step(params, grads, state, config);
  CHECK(params_equal(params, before));
}

TEST_CASE("adam first step has the closed form lr*g/(|g|+eps)") {
  ModelParameters params =
      init_parameters(small_model(Variant::multitask_united), 16, 3);
  ModelParameters before = params;
  GradientSet grads;
  std::mt19937_64 rng(17);
  for (const Tensor* t : tensor_list(params)) {
    Tensor g(t->rows, t->cols);
    for (auto& v : g.v) v = uniform_range(rng, -2.0, 2.0);
    grads.tensors.push_back(std::move(g));
  }
  grads.touched.assign(grads.tensors.size(), 1);
  AdamState state = make_adam_state(params);
  TrainConfig config;
  config.learning_rate = 1e-3;
  adam_step(params, grads, state, config);

  auto pa = tensor_list(params);
  auto pb = tensor_list(before);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < pa[i]->v.size(); ++j) {
      double g = grads.tensors[i].v[j];
      double expected = config.learning_rate * g /
                        (std::fabs(g) + config.adam_epsilon);
      CHECK(pb[i]->v[j] - pa[i]->v[j] == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("adam is deterministic") {
  auto batch = small_batch(InputMode::cs_only);
  auto run_once = [&]() {
    ModelParameters params =
        init_parameters(small_model(Variant::multitask_united), 16, 3);
    AdamState state = make_adam_state(params);
    TrainConfig config;
    for (int i = 0; i < 5; ++i) {
      GradientSet grads =
          backward(params, batch, loss_schedule(params.config.variant)[0]);
      adam_step(params, grads, state, config);
    }
    return params;
  };
  CHECK(params_equal(run_once(), run_once()));
}

TEST_CASE("train: determinism and finiteness") {
  Corpus corpus = make_separable_corpus(60, 96, 5);
  SplitSpec spec;
  SplitResult split = split_corpus(corpus, spec);
  ModelConfig model = small_model(Variant::multitask_united);
  model.epochs = 2;
  EncoderConfig encoder = small_encoder();
  TrainConfig tc;
  tc.epochs = 2;
  tc.seed = 42;

  TrainResult a = train(model, encoder, split.train, split.val, tc);
  TrainResult b = train(model, encoder, split.train, split.val, tc);
  CHECK(params_equal(a.params, b.params));
  REQUIRE(a.history.epochs.size() == 2);
  for (std::size_t e = 0; e < a.history.epochs.size(); ++e) {
    for (int t = 0; t < kNumDims; ++t) {
      CHECK(a.history.epochs[e].mean_task_loss[static_cast<std::size_t>(t)] ==
            b.history.epochs[e].mean_task_loss[static_cast<std::size_t>(t)]);
    }
    CHECK(a.history.epochs[e].val_macro_f1 == b.history.epochs[e].val_macro_f1);
  }
  for (const Tensor* t : tensor_list(a.params)) {
    for (double v : t->v) CHECK(std::isfinite(v));
  }
}

TEST_CASE("train: different seeds give different parameters") {
  Corpus corpus = make_separable_corpus(40, 96, 5);
  SplitSpec spec;
  SplitResult split = split_corpus(corpus, spec);
  ModelConfig model = small_model(Variant::multitask_united);
  EncoderConfig encoder = small_encoder();
  TrainConfig t1, t2;
  t1.epochs = t2.epochs = 1;
  t1.seed = 42;
  t2.seed = 0;
  TrainResult a = train(model, encoder, split.train, split.val, t1);
  TrainResult b = train(model, encoder, split.train, split.val, t2);
  CHECK_FALSE(params_equal(a.params, b.params));
}

TEST_CASE("one step of divided differs from one step of united") {
  Corpus corpus = make_separable_corpus(16, 96, 9);
  Corpus val;  // empty validation is fine for this fixture
  EncoderConfig encoder = small_encoder();
  TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 16;  // single batch, single pass

  ModelConfig divided = small_model(Variant::multitask_divided);
  ModelConfig united = small_model(Variant::multitask_united);
  TrainResult a = train(divided, encoder, corpus, val, tc);
  TrainResult b = train(united, encoder, corpus, val, tc);

  // Same initialization, different schedules: trunks must diverge.
  ModelParameters init_a = init_parameters(divided, encoder.feature_dim, tc.seed);
  ModelParameters init_b = init_parameters(united, encoder.feature_dim, tc.seed);
  CHECK(params_equal(init_a, init_b));
  CHECK_FALSE(params_equal(a.params, b.params));
}

TEST_CASE("train rejects unlabeled pairs and bad configs") {
  Corpus corpus = make_separable_corpus(10, 96, 2);
  corpus.pairs[3].labels.reset();
  ModelConfig model = small_model(Variant::multitask_united);
  EncoderConfig encoder = small_encoder();
  TrainConfig tc;
  CHECK_THROWS_WITH_AS(train(model, encoder, corpus, Corpus{}, tc),
                       doctest::Contains("labels"), ValidationError);

  TrainConfig bad;
  bad.epochs = 0;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("epochs"),
                       ValidationError);
  bad = TrainConfig{};
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = TrainConfig{};
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("training loss decreases on a separable corpus") {
  Corpus corpus = make_separable_corpus(120, 96, 33);
  SplitSpec spec;
  SplitResult split = split_corpus(corpus, spec);
  ModelConfig model = small_model(Variant::multitask_united);
  model.hidden_dim = 16;
  model.epochs = 4;
  EncoderConfig encoder = small_encoder();
  encoder.feature_dim = 256;
  TrainConfig tc;
  tc.epochs = 4;
  TrainResult r = train(model, encoder, split.train, split.val, tc);
  auto total = [&](const EpochRecord& e) {
    double s = 0.0;
    for (double v : e.mean_task_loss) s += v;
    return s;
  };
  for (std::size_t e = 1; e < r.history.epochs.size(); ++e) {
    CHECK(total(r.history.epochs[e]) < total(r.history.epochs[e - 1]));
  }
}

TEST_CASE("predict_corpus works on unlabeled pairs") {
  Corpus corpus = make_separable_corpus(8, 96, 4);
  for (auto& p : corpus.pairs) p.labels.reset();
  ModelParameters params =
      init_parameters(small_model(Variant::multitask_united), 16, 1);
  auto preds = predict_corpus(params, small_encoder(), corpus);
  CHECK(preds.size() == corpus.size());
  for (const auto& lv : preds) CHECK_NOTHROW(validate_labels(lv));
}
