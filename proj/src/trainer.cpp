#include "cseval/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cseval/eval.hpp"
#include "cseval/rng.hpp"

namespace cseval {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || learning_rate > 1.0) {
    throw ValidationError("train.learning_rate must lie in (0,1]");
  }
  if (batch_size < 1) throw ValidationError("train.batch_size must be >= 1");
  if (epochs < 1 || epochs > 100) {
    throw ValidationError("train.epochs must lie in [1,100]");
  }
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sum_exp(std::span<const double> z) {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

// Tensor offsets within tensor_list() order.
struct Layout {
  std::size_t n_enc;
  std::size_t enc_w(std::size_t e) const { return e; }
  std::size_t enc_b(std::size_t e) const { return n_enc + e; }
  std::size_t head_w(int t) const { return 2 * n_enc + static_cast<std::size_t>(t); }
  std::size_t head_b(int t) const {
    return 2 * n_enc + kNumDims + static_cast<std::size_t>(t);
  }
  std::size_t task_u(int t) const {
    return 2 * n_enc + 2 * kNumDims + static_cast<std::size_t>(t);
  }
  std::size_t task_v(int t) const {
    return 2 * n_enc + 3 * kNumDims + static_cast<std::size_t>(t);
  }
  std::size_t dep_raw() const { return 2 * n_enc + 4 * kNumDims; }
};

Layout layout_of(const ModelParameters& params) {
  return Layout{params.enc_w.size()};
}

// d(loss)/d(final logits) for one task.
std::vector<double> loss_gradient(const ModelParameters& params, int task,
                                  std::span<const double> z, int gold) {
  const auto& dim = dimension(task);
  switch (task_loss_kind(params.config.variant, task)) {
    case TaskLoss::bce: {
      return {sigmoid(z[0]) - static_cast<double>(gold)};
    }
    case TaskLoss::focal: {
      double gamma = params.config.focal_gamma;
      if (dim.kind == DimKind::binary) {
        double alpha = params.focal_alpha[static_cast<std::size_t>(task)]
                                         [static_cast<std::size_t>(gold)];
        double s = gold == 1 ? 1.0 : -1.0;
        double pg = sigmoid(s * z[0]);
        double one_minus = sigmoid(-s * z[0]);
        double log_pg = pg > 0.0 ? std::log(pg) : 0.0;  // pg*log(pg) -> 0
        double g = s * alpha * std::pow(one_minus, gamma) *
                   (gamma * pg * log_pg - one_minus);
        return {g};
      }
      int gi = gold - 1;
      double lse = log_sum_exp(z);
      std::vector<double> p(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) p[i] = std::exp(z[i] - lse);
      double pg = p[static_cast<std::size_t>(gi)];
      double one_minus = 1.0 - pg;
      double alpha = params.focal_alpha[static_cast<std::size_t>(task)]
                                       [static_cast<std::size_t>(gi)];
      double w;
      if (one_minus <= 0.0) {
        w = gamma == 0.0 ? -alpha : 0.0;
      } else {
        double log_pg = z[static_cast<std::size_t>(gi)] - lse;
        w = alpha * (gamma * std::pow(one_minus, gamma - 1.0) * pg * log_pg -
                     std::pow(one_minus, gamma));
      }
      std::vector<double> g(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) {
        double indicator = static_cast<int>(i) == gi ? 1.0 : 0.0;
        g[i] = w * (indicator - p[i]);
      }
      return g;
    }
    case TaskLoss::ce: {
      int gi = gold - 1;
      double lse = log_sum_exp(z);
      std::vector<double> g(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) {
        g[i] = std::exp(z[i] - lse) - (static_cast<int>(i) == gi ? 1.0 : 0.0);
      }
      return g;
    }
  }
  return {};
}

void add_outer(Tensor& grad, std::span<const double> row,
               std::span<const double> col) {
  for (std::size_t r = 0; r < grad.rows; ++r) {
    double rv = row[r];
    if (rv == 0.0) continue;
    double* out = &grad.v[r * grad.cols];
    for (std::size_t c = 0; c < grad.cols; ++c) out[c] += rv * col[c];
  }
}

// grad += w^T * delta for matvec y = W x.
void add_transpose_matvec(std::vector<double>& out, const Tensor& w,
                          std::span<const double> delta) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    double d = delta[r];
    if (d == 0.0) continue;
    const double* row = &w.v[r * w.cols];
    for (std::size_t c = 0; c < w.cols; ++c) out[c] += d * row[c];
  }
}

}  // namespace

GradientSet backward(const ModelParameters& params,
                     std::span<const TrainSample> batch,
                     std::span<const int> group) {
  GradientSet grads;
  backward_into(params, batch, group, grads);
  return grads;
}

void backward_into(const ModelParameters& params,
                   std::span<const TrainSample> batch,
                   std::span<const int> group, GradientSet& grads) {
  const Layout lay = layout_of(params);
  const bool dep = params.config.variant == Variant::dependency_matrix;
  const std::size_t k = static_cast<std::size_t>(params.config.task_embed_dim);

  auto tensors = tensor_list(params);
  if (grads.tensors.size() != tensors.size()) {
    grads.tensors.clear();
    grads.tensors.reserve(tensors.size());
    for (const Tensor* t : tensors) grads.tensors.emplace_back(t->rows, t->cols);
  } else {
    // Reused buffer: clear what the previous step touched.
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      if (grads.touched[i]) grads.tensors[i].zero();
    }
  }
  grads.touched.assign(tensors.size(), 0);
  grads.task_loss_sum.fill(0.0);

  std::array<bool, kNumDims> in_group{};
  for (int t : group) in_group[static_cast<std::size_t>(t)] = true;

  // Tasks whose base logits receive gradient: mixing routes every group
  // task's gradient into all six base heads.
  std::array<bool, kNumDims> delta_tasks = in_group;
  if (dep) delta_tasks.fill(true);

  for (int t = 0; t < kNumDims; ++t) {
    if (!delta_tasks[static_cast<std::size_t>(t)]) continue;
    grads.touched[lay.head_w(t)] = 1;
    grads.touched[lay.head_b(t)] = 1;
    std::size_t e = static_cast<std::size_t>(params.encoder_index(t));
    grads.touched[lay.enc_w(e)] = 1;
    grads.touched[lay.enc_b(e)] = 1;
  }
  if (dep) {
    for (int t = 0; t < kNumDims; ++t) {
      grads.touched[lay.task_u(t)] = 1;
      grads.touched[lay.task_v(t)] = 1;
    }
    grads.touched[lay.dep_raw()] = 1;
  }

  double loss_sum = 0.0;
  ForwardCache cache;
  for (const TrainSample& sample : batch) {
    forward(sample.x, params, &cache);

    std::array<std::vector<double>, kNumDims> final_grad;
    for (int t = 0; t < kNumDims; ++t) {
      if (!in_group[static_cast<std::size_t>(t)]) continue;
      int gold = sample.y[t];
      double l = task_loss(params, cache.mixed, t, gold);
      grads.task_loss_sum[static_cast<std::size_t>(t)] += l;
      loss_sum += l;
      final_grad[static_cast<std::size_t>(t)] = loss_gradient(
          params, t, cache.mixed[static_cast<std::size_t>(t)], gold);
    }

    std::array<std::vector<double>, kNumDims> base_grad;
    if (dep) {
      // z'_t = z_t + V_t sum_j g_tj U_j z_j
      std::vector<double> ge(kNumDims * k, 0.0);  // grad wrt e_j, packed
      for (int t = 0; t < kNumDims; ++t) {
        const auto& fg = final_grad[static_cast<std::size_t>(t)];
        if (fg.empty()) continue;
        const Tensor& vt = params.task_v[static_cast<std::size_t>(t)];

        // s_t = sum_j g_tj e_j
        std::vector<double> mix(k, 0.0);
        for (int j = 0; j < kNumDims; ++j) {
          if (params.config.zero_dependency_diagonal && t == j) continue;
          double gate = sigmoid(params.dep_raw.at(static_cast<std::size_t>(t),
                                                  static_cast<std::size_t>(j)));
          const auto& e = cache.embed[static_cast<std::size_t>(j)];
          for (std::size_t i = 0; i < k; ++i) mix[i] += gate * e[i];
        }
        add_outer(grads.tensors[lay.task_v(t)], fg, mix);

        std::vector<double> gs(k, 0.0);  // V_t^T fg
        add_transpose_matvec(gs, vt, fg);

        for (int j = 0; j < kNumDims; ++j) {
          if (params.config.zero_dependency_diagonal && t == j) continue;
          double raw = params.dep_raw.at(static_cast<std::size_t>(t),
                                         static_cast<std::size_t>(j));
          double gate = sigmoid(raw);
          const auto& e = cache.embed[static_cast<std::size_t>(j)];
          double dot = 0.0;
          for (std::size_t i = 0; i < k; ++i) dot += gs[i] * e[i];
          grads.tensors[lay.dep_raw()].at(static_cast<std::size_t>(t),
                                          static_cast<std::size_t>(j)) +=
              dot * gate * (1.0 - gate);
          double* gej = &ge[static_cast<std::size_t>(j) * k];
          for (std::size_t i = 0; i < k; ++i) gej[i] += gate * gs[i];
        }
      }
      for (int j = 0; j < kNumDims; ++j) {
        std::span<const double> gej(&ge[static_cast<std::size_t>(j) * k], k);
        add_outer(grads.tensors[lay.task_u(j)], gej,
                  cache.base[static_cast<std::size_t>(j)]);
        auto& bg = base_grad[static_cast<std::size_t>(j)];
        bg.assign(cache.base[static_cast<std::size_t>(j)].size(), 0.0);
        add_transpose_matvec(bg, params.task_u[static_cast<std::size_t>(j)], gej);
        const auto& fg = final_grad[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < fg.size(); ++i) bg[i] += fg[i];
      }
    } else {
      base_grad = std::move(final_grad);
    }

    std::vector<std::vector<double>> dh(params.enc_w.size());
    for (int t = 0; t < kNumDims; ++t) {
      const auto& bg = base_grad[static_cast<std::size_t>(t)];
      if (bg.empty()) continue;
      std::size_t e = static_cast<std::size_t>(params.encoder_index(t));
      const auto& h = cache.h[e];
      add_outer(grads.tensors[lay.head_w(t)], bg, h);
      auto& hb = grads.tensors[lay.head_b(t)];
      for (std::size_t i = 0; i < bg.size(); ++i) hb.v[i] += bg[i];
      if (dh[e].empty()) dh[e].assign(h.size(), 0.0);
      add_transpose_matvec(dh[e], params.head_w[static_cast<std::size_t>(t)], bg);
    }

    for (std::size_t e = 0; e < params.enc_w.size(); ++e) {
      if (dh[e].empty()) continue;
      const auto& h_pre = cache.h_pre[e];
      std::vector<double> dpre(dh[e].size());
      for (std::size_t i = 0; i < dpre.size(); ++i) {
        dpre[i] = h_pre[i] > 0.0 ? dh[e][i] : 0.0;
      }
      Tensor& gw = grads.tensors[lay.enc_w(e)];
      for (const auto& [idx, val] : sample.x.entries) {
        for (std::size_t r = 0; r < gw.rows; ++r) {
          gw.at(r, static_cast<std::size_t>(idx)) += dpre[r] * val;
        }
      }
      Tensor& gb = grads.tensors[lay.enc_b(e)];
      for (std::size_t i = 0; i < dpre.size(); ++i) gb.v[i] += dpre[i];
    }
  }

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < grads.tensors.size(); ++i) {
    if (!grads.touched[i]) continue;
    for (double& v : grads.tensors[i].v) v *= inv_n;
  }
  grads.group_loss_mean = loss_sum * inv_n;
}

double batch_group_loss(const ModelParameters& params,
                        std::span<const TrainSample> batch,
                        std::span<const int> group) {
  double sum = 0.0;
  for (const TrainSample& sample : batch) {
    TaskLogits logits = forward(sample.x, params);
    for (int t : group) sum += task_loss(params, logits, t, sample.y[t]);
  }
  return sum / static_cast<double>(batch.size());
}

AdamState make_adam_state(const ModelParameters& params) {
  AdamState state;
  for (const Tensor* t : tensor_list(params)) {
    state.m.emplace_back(t->rows, t->cols);
    state.v.emplace_back(t->rows, t->cols);
  }
  state.step.assign(state.m.size(), 0);
  return state;
}

void adam_step(ModelParameters& params, const GradientSet& grads,
               AdamState& state, const TrainConfig& config) {
  auto tensors = tensor_list(params);
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (!grads.touched[i]) continue;
    state.step[i] += 1;
    const double b1 = config.adam_beta1;
    const double b2 = config.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step[i]));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step[i]));
    Tensor& theta = *tensors[i];
    const Tensor& g = grads.tensors[i];
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    for (std::size_t j = 0; j < theta.v.size(); ++j) {
      m.v[j] = b1 * m.v[j] + (1.0 - b1) * g.v[j];
      v.v[j] = b2 * v.v[j] + (1.0 - b2) * g.v[j] * g.v[j];
      double m_hat = m.v[j] / bc1;
      double v_hat = v.v[j] / bc2;
      theta.v[j] -= config.learning_rate * m_hat /
                    (std::sqrt(v_hat) + config.adam_epsilon);
    }
  }
}

void sgd_step(ModelParameters& params, const GradientSet& grads, double lr) {
  auto tensors = tensor_list(params);
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (!grads.touched[i]) continue;
    for (std::size_t j = 0; j < tensors[i]->v.size(); ++j) {
      tensors[i]->v[j] -= lr * grads.tensors[i].v[j];
    }
  }
}

GradientCheckResult gradient_check(const ModelParameters& params,
                                   std::span<const TrainSample> batch,
                                   double epsilon, std::uint64_t seed,
                                   bool self_test_corruption) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw ValidationError("gradient_check epsilon must lie in [1e-7, 1e-3]");
  }
  const Layout lay = layout_of(params);
  auto tensors = tensor_list(params);

  // (tensor, flat index) pairs: a uniform draw over everything plus a forced
  // quota from dep_raw / U / V.
  std::vector<std::pair<std::size_t, std::size_t>> picks;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::mt19937_64 rng(seed);

  std::size_t total = 0;
  for (const Tensor* t : tensors) total += t->size();
  auto nth_scalar = [&](std::uint64_t n) {
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      if (n < tensors[i]->size()) return std::make_pair(i, static_cast<std::size_t>(n));
      n -= tensors[i]->size();
    }
    return std::make_pair(tensors.size() - 1, tensors.back()->size() - 1);
  };

  const std::size_t duv_begin = lay.task_u(0);
  std::size_t duv_total = 0;
  for (std::size_t i = duv_begin; i < tensors.size(); ++i) duv_total += tensors[i]->size();
  auto nth_duv = [&](std::uint64_t n) {
    for (std::size_t i = duv_begin; i < tensors.size(); ++i) {
      if (n < tensors[i]->size()) return std::make_pair(i, static_cast<std::size_t>(n));
      n -= tensors[i]->size();
    }
    return std::make_pair(tensors.size() - 1, tensors.back()->size() - 1);
  };

  const std::size_t want_general = std::min<std::size_t>(200, total);
  const std::size_t want_duv = std::min<std::size_t>(15, duv_total);
  std::size_t guard = 0;
  while (picks.size() < want_general && guard++ < 100000) {
    auto p = nth_scalar(uniform_below(rng, total));
    if (seen.insert(p).second) picks.push_back(p);
  }
  std::size_t n_duv = 0;
  for (const auto& p : picks) {
    if (p.first >= duv_begin) ++n_duv;
  }
  guard = 0;
  while (n_duv < want_duv && guard++ < 100000) {
    auto p = nth_duv(uniform_below(rng, duv_total));
    if (seen.insert(p).second) {
      picks.push_back(p);
      ++n_duv;
    }
  }

  GradientCheckResult result;
  result.n_checked = picks.size();
  result.n_dep_params = n_duv;

  ModelParameters probe = params;
  auto probe_tensors = tensor_list(probe);
  bool corrupted = false;

  for (const auto& group : loss_schedule(params.config.variant)) {
    GradientSet analytic = backward(params, batch, group);
    for (const auto& [ti, j] : picks) {
      double ga = analytic.tensors[ti].v[j];
      if (self_test_corruption && !corrupted && std::fabs(ga) > 1e-6) {
        ga = -ga;
        corrupted = true;
      }
      double saved = probe_tensors[ti]->v[j];
      probe_tensors[ti]->v[j] = saved + epsilon;
      double lp = batch_group_loss(probe, batch, group);
      probe_tensors[ti]->v[j] = saved - epsilon;
      double lm = batch_group_loss(probe, batch, group);
      probe_tensors[ti]->v[j] = saved;
      double fd = (lp - lm) / (2.0 * epsilon);
      double rel = std::fabs(ga - fd) / std::max(1e-8, std::fabs(ga) + std::fabs(fd));
      result.max_rel_error = std::max(result.max_rel_error, rel);
    }
  }
  return result;
}

std::vector<TrainSample> encode_corpus(const Corpus& corpus,
                                       const EncoderConfig& encoder) {
  std::vector<TrainSample> samples;
  samples.reserve(corpus.pairs.size());
  for (const auto& pair : corpus.pairs) {
    if (!pair.labels) {
      throw ValidationError("pair '" + pair.id +
                            "' has no labels; training and evaluation need "
                            "fully labeled corpora");
    }
    samples.push_back({encode(pair, encoder), *pair.labels});
  }
  return samples;
}

std::array<std::array<double, 3>, kNumDims> inverse_frequency_alpha(
    std::span<const TrainSample> samples) {
  std::array<std::array<double, 3>, kNumDims> alpha;
  for (int t = 0; t < kNumDims; ++t) {
    const auto& dim = dimension(t);
    std::array<double, 3> counts{0.0, 0.0, 0.0};
    for (const auto& s : samples) {
      counts[static_cast<std::size_t>(dim.class_index(s.y[t]))] += 1.0;
    }
    std::array<double, 3> w{1.0, 1.0, 1.0};
    double sum = 0.0;
    int present = 0;
    for (int c = 0; c < dim.num_classes(); ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0.0) {
        w[static_cast<std::size_t>(c)] = 1.0 / counts[static_cast<std::size_t>(c)];
        sum += w[static_cast<std::size_t>(c)];
        ++present;
      }
    }
    if (present > 0) {
      double scale = static_cast<double>(present) / sum;
      for (int c = 0; c < dim.num_classes(); ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0.0) {
          w[static_cast<std::size_t>(c)] *= scale;
        } else {
          w[static_cast<std::size_t>(c)] = 1.0;
        }
      }
    }
    alpha[static_cast<std::size_t>(t)] = w;
  }
  return alpha;
}

std::vector<LabelVector> predict_corpus(const ModelParameters& params,
                                        const EncoderConfig& encoder,
                                        const Corpus& corpus) {
  std::vector<LabelVector> preds;
  preds.reserve(corpus.pairs.size());
  for (const auto& pair : corpus.pairs) {
    preds.push_back(predict(forward(encode(pair, encoder), params)));
  }
  return preds;
}

TrainResult train(const ModelConfig& model_config,
                  const EncoderConfig& encoder_config, const Corpus& train_corpus,
                  const Corpus& val_corpus, const TrainConfig& train_config) {
  model_config.validate();
  encoder_config.validate();
  train_config.validate();
  if (train_corpus.pairs.empty()) {
    throw ValidationError("training corpus is empty");
  }

  std::vector<TrainSample> train_samples = encode_corpus(train_corpus, encoder_config);
  std::vector<LabelVector> val_gold;
  for (const auto& pair : val_corpus.pairs) {
    if (!pair.labels) {
      throw ValidationError("pair '" + pair.id + "' in validation corpus has no labels");
    }
    val_gold.push_back(*pair.labels);
  }

  ModelParameters params = init_parameters(
      model_config, encoder_config.feature_dim, train_config.seed);
  if (model_config.focal_alpha.mode == FocalAlphaSpec::Mode::inverse_frequency) {
    params.focal_alpha = inverse_frequency_alpha(train_samples);
  } else {
    for (auto& row : params.focal_alpha) {
      row.fill(model_config.focal_alpha.fixed_value);
    }
  }

  AdamState adam = make_adam_state(params);
  const auto schedule = loss_schedule(model_config.variant);
  std::vector<GradientSet> grad_buffers(schedule.size());
  const std::size_t n = train_samples.size();
  const std::size_t bs = static_cast<std::size_t>(train_config.batch_size);

  TrainResult result;
  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(mix_seed(train_config.seed, static_cast<std::uint64_t>(epoch)));
    seeded_shuffle(order, rng);

    std::array<double, kNumDims> loss_sum{};
    for (std::size_t start = 0; start < n; start += bs) {
      std::size_t end = std::min(n, start + bs);
      std::vector<TrainSample> samples;
      samples.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        samples.push_back(train_samples[order[i]]);
      }
      for (std::size_t gi = 0; gi < schedule.size(); ++gi) {
        const auto& group = schedule[gi];
        GradientSet& grads = grad_buffers[gi];
        backward_into(params, samples, group, grads);
        if (!std::isfinite(grads.group_loss_mean)) {
          throw ExecutionError(
              "non-finite loss at epoch " + std::to_string(epoch + 1) +
              ", batch starting at " + std::to_string(start) + " (variant " +
              std::string(variant_name(model_config.variant)) + ")");
        }
        for (int t : group) {
          loss_sum[static_cast<std::size_t>(t)] +=
              grads.task_loss_sum[static_cast<std::size_t>(t)];
        }
        if (train_config.optimizer == TrainConfig::Optimizer::adam) {
          adam_step(params, grads, adam, train_config);
        } else {
          sgd_step(params, grads, train_config.learning_rate);
        }
      }
    }

    EpochRecord record;
    for (int t = 0; t < kNumDims; ++t) {
      record.mean_task_loss[static_cast<std::size_t>(t)] =
          loss_sum[static_cast<std::size_t>(t)] / static_cast<double>(n);
    }
    if (!val_gold.empty()) {
      auto preds = predict_corpus(params, encoder_config, val_corpus);
      record.val_macro_f1 =
          score_dimensions(preds, val_gold, Averaging::weighted).macro_avg;
    }
    result.history.epochs.push_back(record);
  }

  result.params = std::move(params);
  return result;
}

std::string format_history(const TrainHistory& history) {
  std::string out =
      "epoch";
  for (int t = 0; t < kNumDims; ++t) {
    out += "  loss(" + std::string(dimension(t).name) + ")";
  }
  out += "  val_macro_f1\n";
  char buf[64];
  for (std::size_t e = 0; e < history.epochs.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%5zu", e + 1);
    out += buf;
    for (int t = 0; t < kNumDims; ++t) {
      std::snprintf(buf, sizeof(buf), "  %.6f",
                    history.epochs[e].mean_task_loss[static_cast<std::size_t>(t)]);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "  %.6f\n", history.epochs[e].val_macro_f1);
    out += buf;
  }
  return out;
}

}  // namespace cseval
