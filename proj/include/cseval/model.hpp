#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cseval/encoder.hpp"
#include "cseval/schema.hpp"

namespace cseval {

enum class Variant {
  independent,
  multitask_divided,
  multitask_united,
  dependency_matrix,
};

std::string_view variant_name(Variant v);
std::optional<Variant> variant_from_name(std::string_view name);

struct FocalAlphaSpec {
  enum class Mode { inverse_frequency, fixed };
  Mode mode = Mode::inverse_frequency;
  double fixed_value = 1.0;
};

struct ModelConfig {
  Variant variant = Variant::multitask_united;
  int hidden_dim = 64;
  int task_embed_dim = 8;
  double focal_gamma = 2.0;
  FocalAlphaSpec focal_alpha;
  int epochs = 3;
  InputMode input_mode = InputMode::cs_only;
  bool zero_dependency_diagonal = false;

  void validate() const;
};

// Row-major dense matrix; vectors use cols == 1.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 1;
  std::vector<double> v;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
  std::size_t size() const { return v.size(); }
  void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

// Number of output logits for a task: 1 for binary heads, 3 for ordinal.
int task_width(int task);

struct ModelParameters {
  ModelConfig config;
  int feature_dim = 0;

  // The shared projection. Every variant uses one encoder block; the
  // independent baseline differs only in its update schedule (one step per
  // task head instead of a joint step).
  std::vector<Tensor> enc_w;  // hidden x feature_dim
  std::vector<Tensor> enc_b;  // hidden
  std::array<Tensor, kNumDims> head_w;  // c_t x hidden
  std::array<Tensor, kNumDims> head_b;  // c_t
  std::array<Tensor, kNumDims> task_u;  // embed x c_t
  std::array<Tensor, kNumDims> task_v;  // c_t x embed
  Tensor dep_raw;  // 6 x 6, unconstrained; gates are sigmoid(dep_raw)

  // Per-task per-class focal weights, resolved from training frequencies.
  std::array<std::array<double, 3>, kNumDims> focal_alpha{};

  int n_encoders() const { return static_cast<int>(enc_w.size()); }
  int encoder_index(int task) const {
    return n_encoders() == kNumDims ? task : 0;
  }
};

// Weights ~ uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero,
// dep_raw ~ uniform(-1, 1). Fully determined by the seed.
ModelParameters init_parameters(const ModelConfig& config, int feature_dim,
                                std::uint64_t seed);

// Fixed enumeration of all parameter tensors; the order defines the
// checkpoint layout and the optimizer state alignment.
std::vector<Tensor*> tensor_list(ModelParameters& params);
std::vector<const Tensor*> tensor_list(const ModelParameters& params);
std::vector<std::string> tensor_names(const ModelParameters& params);

using TaskLogits = std::array<std::vector<double>, kNumDims>;

struct ForwardCache {
  // Indexed like enc_w.
  std::vector<std::vector<double>> h_pre;
  std::vector<std::vector<double>> h;
  TaskLogits base;                                   // z_t before mixing
  std::array<std::vector<double>, kNumDims> embed;   // e_j = U_j z_j
  TaskLogits mixed;                                  // final logits
};

// h = relu(W_enc x + b); z_t = W_t h + b_t.
TaskLogits forward_base(const FeatureVector& x, const ModelParameters& params);

// z'_t = z_t + V_t * sum_j sigmoid(dep_raw[t][j]) * U_j z_j.
TaskLogits apply_dependency_mixing(const TaskLogits& z,
                                   const ModelParameters& params);

// Final logits for the configured variant; cache is optional.
TaskLogits forward(const FeatureVector& x, const ModelParameters& params,
                   ForwardCache* cache = nullptr);

// Binary: 1 iff sigmoid(logit) >= 0.5. Ordinal: argmax class, ties toward
// the lowest class index.
LabelVector predict(const TaskLogits& logits);

// Losses, all in numerically stable log-sum-exp form.
double loss_bce(double logit, int gold);
double loss_ce(std::span<const double> logits, int gold_value);
double loss_focal(double logit, int gold, double gamma, double alpha);
double loss_focal(std::span<const double> logits, int gold_value, double gamma,
                  std::span<const double> alpha);

enum class TaskLoss { bce, focal, ce };
TaskLoss task_loss_kind(Variant variant, int task);

// Loss of one task on final logits, using the variant's per-task loss.
double task_loss(const ModelParameters& params, const TaskLogits& logits,
                 int task, int gold_value);

// Update groups per batch: independent trains each task alone, divided
// alternates a binary-group and a categorical-group step, united and
// dependency take one step on everything.
std::vector<std::vector<int>> loss_schedule(Variant variant);

double total_loss(Variant variant, std::span<const double> per_task_losses);
double group_loss(std::span<const double> per_task_losses,
                  std::span<const int> group);

struct DependencyMatrixView {
  std::array<std::array<double, kNumDims>, kNumDims> values{};  // row = influenced
};

// Element-wise sigmoid of dep_raw. Only meaningful for the dependency
// variant; throws otherwise.
DependencyMatrixView dependency_view(const ModelParameters& params);

// Plain-text 6x6 table with row/column labels, 4 decimal places.
std::string format_dependency_view(const DependencyMatrixView& view);

// Versioned JSON checkpoint with config, schema order and all tensors.
void save_checkpoint(const ModelParameters& params, const std::string& path);
ModelParameters load_checkpoint(const std::string& path);

}  // namespace cseval
