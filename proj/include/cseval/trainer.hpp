#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cseval/corpus.hpp"
#include "cseval/model.hpp"

namespace cseval {

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 16;
  int epochs = 3;
  std::uint64_t seed = 42;
  enum class Optimizer { adam, sgd };
  Optimizer optimizer = Optimizer::adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
};

struct TrainSample {
  FeatureVector x;
  LabelVector y;
};

// Mean-over-batch gradients for one schedule group. Tensors align with
// tensor_list(); untouched tensors stay zero and are skipped by the
// optimizer, so group steps never move parameters outside the group.
struct GradientSet {
  std::vector<Tensor> tensors;
  std::vector<char> touched;
  std::array<double, kNumDims> task_loss_sum{};  // summed over the batch
  double group_loss_mean = 0.0;
};

GradientSet backward(const ModelParameters& params,
                     std::span<const TrainSample> batch,
                     std::span<const int> group);

// Same, but reuses the caller's buffer across batches; only tensors touched
// by the group are re-zeroed, which keeps the per-batch cost proportional to
// the group's parameters.
void backward_into(const ModelParameters& params,
                   std::span<const TrainSample> batch,
                   std::span<const int> group, GradientSet& out);

// Mean loss of the group over the batch, forward only.
double batch_group_loss(const ModelParameters& params,
                        std::span<const TrainSample> batch,
                        std::span<const int> group);

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::vector<std::int64_t> step;
};

AdamState make_adam_state(const ModelParameters& params);

// Bias-corrected first/second-moment update, applied to touched tensors.
void adam_step(ModelParameters& params, const GradientSet& grads,
               AdamState& state, const TrainConfig& config);

void sgd_step(ModelParameters& params, const GradientSet& grads, double lr);

struct GradientCheckResult {
  double max_rel_error = 0.0;
  std::size_t n_checked = 0;
  std::size_t n_dep_params = 0;  // scalars drawn from dep_raw / U / V
};

// Central finite differences on >= 200 randomly selected scalars (>= 10 of
// them from dep_raw, U, V), across every group of the variant's schedule.
// self_test_corruption negates one analytic component so tests can confirm
// the checker catches a wrong gradient.
GradientCheckResult gradient_check(const ModelParameters& params,
                                   std::span<const TrainSample> batch,
                                   double epsilon, std::uint64_t seed,
                                   bool self_test_corruption = false);

struct EpochRecord {
  std::array<double, kNumDims> mean_task_loss{};
  double val_macro_f1 = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

struct TrainResult {
  ModelParameters params;
  TrainHistory history;
};

std::vector<TrainSample> encode_corpus(const Corpus& corpus,
                                       const EncoderConfig& encoder);

// Per-class focal weights from training-label frequencies, normalized to
// average 1 over the classes present.
std::array<std::array<double, 3>, kNumDims> inverse_frequency_alpha(
    std::span<const TrainSample> samples);

// Shuffled mini-batch training; shuffling is reseeded per epoch from
// (seed, epoch). Throws ExecutionError when the loss stops being finite.
TrainResult train(const ModelConfig& model_config,
                  const EncoderConfig& encoder_config, const Corpus& train_corpus,
                  const Corpus& val_corpus, const TrainConfig& train_config);

std::vector<LabelVector> predict_corpus(const ModelParameters& params,
                                        const EncoderConfig& encoder,
                                        const Corpus& corpus);

std::string format_history(const TrainHistory& history);

}  // namespace cseval
