#include "cseval/model.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "cseval/rng.hpp"

namespace cseval {

using nlohmann::json;

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::independent: return "independent";
    case Variant::multitask_divided: return "multitask_divided";
    case Variant::multitask_united: return "multitask_united";
    case Variant::dependency_matrix: return "dependency_matrix";
  }
  return "?";
}

std::optional<Variant> variant_from_name(std::string_view name) {
  for (Variant v : {Variant::independent, Variant::multitask_divided,
                    Variant::multitask_united, Variant::dependency_matrix}) {
    if (variant_name(v) == name) return v;
  }
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (hidden_dim < 1) throw ValidationError("model.hidden_dim must be >= 1");
  if (task_embed_dim < 1) {
    throw ValidationError("model.task_embed_dim must be >= 1");
  }
  if (!(focal_gamma >= 0.0) || !std::isfinite(focal_gamma)) {
    throw ValidationError("model.focal_gamma must be finite and >= 0");
  }
  if (epochs < 1 || epochs > 100) {
    throw ValidationError("model.epochs must lie in [1,100]");
  }
}

int task_width(int task) {
  return dimension(task).kind == DimKind::binary ? 1 : 3;
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  // log(1 + e^z), overflow-safe.
  return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

void fill_uniform(Tensor& t, std::mt19937_64& rng, double r) {
  for (auto& x : t.v) x = uniform_range(rng, -r, r);
}

std::vector<double> matvec(const Tensor& w, std::span<const double> x) {
  std::vector<double> out(w.rows, 0.0);
  for (std::size_t r = 0; r < w.rows; ++r) {
    double s = 0.0;
    const double* row = &w.v[r * w.cols];
    for (std::size_t c = 0; c < w.cols; ++c) s += row[c] * x[c];
    out[r] = s;
  }
  return out;
}

}  // namespace

ModelParameters init_parameters(const ModelConfig& config, int feature_dim,
                                std::uint64_t seed) {
  config.validate();
  if (feature_dim < 2) throw ValidationError("feature_dim must be >= 2");

  ModelParameters p;
  p.config = config;
  p.feature_dim = feature_dim;
  const std::size_t hidden = static_cast<std::size_t>(config.hidden_dim);
  const std::size_t embed = static_cast<std::size_t>(config.task_embed_dim);
  p.enc_w.emplace_back(hidden, static_cast<std::size_t>(feature_dim));
  p.enc_b.emplace_back(hidden, 1);
  for (int t = 0; t < kNumDims; ++t) {
    std::size_t c = static_cast<std::size_t>(task_width(t));
    p.head_w[static_cast<std::size_t>(t)] = Tensor(c, hidden);
    p.head_b[static_cast<std::size_t>(t)] = Tensor(c, 1);
    p.task_u[static_cast<std::size_t>(t)] = Tensor(embed, c);
    p.task_v[static_cast<std::size_t>(t)] = Tensor(c, embed);
  }
  p.dep_raw = Tensor(kNumDims, kNumDims);
  for (auto& row : p.focal_alpha) row = {1.0, 1.0, 1.0};

  std::mt19937_64 rng(seed);
  for (auto& w : p.enc_w) {
    fill_uniform(w, rng, 1.0 / std::sqrt(static_cast<double>(feature_dim)));
  }
  for (int t = 0; t < kNumDims; ++t) {
    fill_uniform(p.head_w[static_cast<std::size_t>(t)], rng,
                 1.0 / std::sqrt(static_cast<double>(hidden)));
  }
  for (int t = 0; t < kNumDims; ++t) {
    fill_uniform(p.task_u[static_cast<std::size_t>(t)], rng,
                 1.0 / std::sqrt(static_cast<double>(task_width(t))));
  }
  for (int t = 0; t < kNumDims; ++t) {
    fill_uniform(p.task_v[static_cast<std::size_t>(t)], rng,
                 1.0 / std::sqrt(static_cast<double>(embed)));
  }
  fill_uniform(p.dep_raw, rng, 1.0);
  return p;
}

std::vector<Tensor*> tensor_list(ModelParameters& params) {
  std::vector<Tensor*> out;
  for (auto& t : params.enc_w) out.push_back(&t);
  for (auto& t : params.enc_b) out.push_back(&t);
  for (auto& t : params.head_w) out.push_back(&t);
  for (auto& t : params.head_b) out.push_back(&t);
  for (auto& t : params.task_u) out.push_back(&t);
  for (auto& t : params.task_v) out.push_back(&t);
  out.push_back(&params.dep_raw);
  return out;
}

std::vector<const Tensor*> tensor_list(const ModelParameters& params) {
  auto mut = tensor_list(const_cast<ModelParameters&>(params));
  return {mut.begin(), mut.end()};
}

std::vector<std::string> tensor_names(const ModelParameters& params) {
  std::vector<std::string> names;
  for (std::size_t e = 0; e < params.enc_w.size(); ++e) {
    names.push_back("enc_w" + std::to_string(e));
  }
  for (std::size_t e = 0; e < params.enc_b.size(); ++e) {
    names.push_back("enc_b" + std::to_string(e));
  }
  for (int t = 0; t < kNumDims; ++t) names.push_back("head_w" + std::to_string(t));
  for (int t = 0; t < kNumDims; ++t) names.push_back("head_b" + std::to_string(t));
  for (int t = 0; t < kNumDims; ++t) names.push_back("task_u" + std::to_string(t));
  for (int t = 0; t < kNumDims; ++t) names.push_back("task_v" + std::to_string(t));
  names.push_back("dep_raw");
  return names;
}

TaskLogits forward_base(const FeatureVector& x, const ModelParameters& params) {
  ForwardCache cache;
  forward(x, params, &cache);
  return cache.base;
}

namespace {

void forward_hidden(const FeatureVector& x, const ModelParameters& params,
                    int enc, std::vector<double>& h_pre, std::vector<double>& h) {
  const Tensor& w = params.enc_w[static_cast<std::size_t>(enc)];
  const Tensor& b = params.enc_b[static_cast<std::size_t>(enc)];
  h_pre.assign(w.rows, 0.0);
  for (const auto& [idx, val] : x.entries) {
    for (std::size_t r = 0; r < w.rows; ++r) {
      h_pre[r] += w.at(r, static_cast<std::size_t>(idx)) * val;
    }
  }
  for (std::size_t r = 0; r < w.rows; ++r) h_pre[r] += b.v[r];
  h.assign(w.rows, 0.0);
  for (std::size_t r = 0; r < w.rows; ++r) h[r] = h_pre[r] > 0.0 ? h_pre[r] : 0.0;
}

}  // namespace

TaskLogits apply_dependency_mixing(const TaskLogits& z,
                                   const ModelParameters& params) {
  TaskLogits mixed = z;
  std::array<std::vector<double>, kNumDims> embed;
  for (int j = 0; j < kNumDims; ++j) {
    embed[static_cast<std::size_t>(j)] =
        matvec(params.task_u[static_cast<std::size_t>(j)],
               z[static_cast<std::size_t>(j)]);
  }
  const std::size_t k = static_cast<std::size_t>(params.config.task_embed_dim);
  for (int t = 0; t < kNumDims; ++t) {
    std::vector<double> mix(k, 0.0);
    for (int j = 0; j < kNumDims; ++j) {
      if (params.config.zero_dependency_diagonal && t == j) continue;
      double gate = sigmoid(params.dep_raw.at(static_cast<std::size_t>(t),
                                              static_cast<std::size_t>(j)));
      const auto& e = embed[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < k; ++i) mix[i] += gate * e[i];
    }
    auto delta = matvec(params.task_v[static_cast<std::size_t>(t)], mix);
    auto& zt = mixed[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < zt.size(); ++i) zt[i] += delta[i];
  }
  return mixed;
}

TaskLogits forward(const FeatureVector& x, const ModelParameters& params,
                   ForwardCache* cache) {
  if (x.dim != params.feature_dim) {
    throw ValidationError("feature vector width " + std::to_string(x.dim) +
                          " does not match model feature_dim " +
                          std::to_string(params.feature_dim));
  }
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  const std::size_t n_enc = params.enc_w.size();
  c.h_pre.assign(n_enc, {});
  c.h.assign(n_enc, {});
  for (std::size_t e = 0; e < n_enc; ++e) {
    forward_hidden(x, params, static_cast<int>(e), c.h_pre[e], c.h[e]);
  }
  for (int t = 0; t < kNumDims; ++t) {
    const auto& h = c.h[static_cast<std::size_t>(params.encoder_index(t))];
    auto z = matvec(params.head_w[static_cast<std::size_t>(t)], h);
    const Tensor& b = params.head_b[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += b.v[i];
    c.base[static_cast<std::size_t>(t)] = std::move(z);
  }
  if (params.config.variant == Variant::dependency_matrix) {
    for (int j = 0; j < kNumDims; ++j) {
      c.embed[static_cast<std::size_t>(j)] =
          matvec(params.task_u[static_cast<std::size_t>(j)],
                 c.base[static_cast<std::size_t>(j)]);
    }
    c.mixed = apply_dependency_mixing(c.base, params);
  } else {
    c.mixed = c.base;
  }
  return c.mixed;
}

LabelVector predict(const TaskLogits& logits) {
  LabelVector out;
  for (int t = 0; t < kNumDims; ++t) {
    const auto& dim = dimension(t);
    const auto& z = logits[static_cast<std::size_t>(t)];
    if (dim.kind == DimKind::binary) {
      out[t] = z[0] >= 0.0 ? 1 : 0;  // sigmoid(z) >= 0.5
    } else {
      std::size_t best = 0;
      for (std::size_t i = 1; i < z.size(); ++i) {
        if (z[i] > z[best]) best = i;
      }
      out[t] = dim.class_value(static_cast<int>(best));
    }
  }
  return out;
}

double loss_bce(double logit, int gold) {
  if (gold != 0 && gold != 1) {
    throw ValidationError("loss_bce gold label must be 0 or 1");
  }
  double s = gold == 1 ? 1.0 : -1.0;
  return softplus(-s * logit);
}

namespace {

double log_sum_exp(std::span<const double> z) {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

double loss_ce(std::span<const double> logits, int gold_value) {
  int g = gold_value - 1;
  if (g < 0 || g >= static_cast<int>(logits.size())) {
    throw ValidationError("loss_ce gold class out of range");
  }
  return log_sum_exp(logits) - logits[static_cast<std::size_t>(g)];
}

double loss_focal(double logit, int gold, double gamma, double alpha) {
  if (gold != 0 && gold != 1) {
    throw ValidationError("loss_focal gold label must be 0 or 1");
  }
  double s = gold == 1 ? 1.0 : -1.0;
  double log_pg = -softplus(-s * logit);   // log p(gold)
  double one_minus_pg = sigmoid(-s * logit);
  return -alpha * std::pow(one_minus_pg, gamma) * log_pg;
}

double loss_focal(std::span<const double> logits, int gold_value, double gamma,
                  std::span<const double> alpha) {
  int g = gold_value - 1;
  if (g < 0 || g >= static_cast<int>(logits.size())) {
    throw ValidationError("loss_focal gold class out of range");
  }
  double log_pg = logits[static_cast<std::size_t>(g)] - log_sum_exp(logits);
  double pg = std::exp(log_pg);
  return -alpha[static_cast<std::size_t>(g)] * std::pow(1.0 - pg, gamma) * log_pg;
}

TaskLoss task_loss_kind(Variant variant, int task) {
  const auto& dim = dimension(task);
  if (variant == Variant::independent) {
    return dim.kind == DimKind::binary ? TaskLoss::bce : TaskLoss::ce;
  }
  if (dim.name == "emotional_appeal") return TaskLoss::bce;
  if (dim.name == "audience_adaptation") return TaskLoss::focal;
  return TaskLoss::ce;
}

double task_loss(const ModelParameters& params, const TaskLogits& logits,
                 int task, int gold_value) {
  const auto& z = logits[static_cast<std::size_t>(task)];
  const auto& dim = dimension(task);
  switch (task_loss_kind(params.config.variant, task)) {
    case TaskLoss::bce:
      return loss_bce(z[0], gold_value);
    case TaskLoss::focal:
      if (dim.kind == DimKind::binary) {
        double alpha = params.focal_alpha[static_cast<std::size_t>(task)]
                                         [static_cast<std::size_t>(gold_value)];
        return loss_focal(z[0], gold_value, params.config.focal_gamma, alpha);
      }
      return loss_focal(z, gold_value, params.config.focal_gamma,
                        params.focal_alpha[static_cast<std::size_t>(task)]);
    case TaskLoss::ce:
      return loss_ce(z, gold_value);
  }
  return 0.0;
}

std::vector<std::vector<int>> loss_schedule(Variant variant) {
  switch (variant) {
    case Variant::independent:
      return {{0}, {1}, {2}, {3}, {4}, {5}};
    case Variant::multitask_divided:
      return {{0, 1}, {2, 3, 4, 5}};
    case Variant::multitask_united:
    case Variant::dependency_matrix:
      return {{0, 1, 2, 3, 4, 5}};
  }
  return {};
}

double total_loss(Variant variant, std::span<const double> per_task_losses) {
  double sum = 0.0;
  for (const auto& group : loss_schedule(variant)) {
    sum += group_loss(per_task_losses, group);
  }
  return sum;
}

double group_loss(std::span<const double> per_task_losses,
                  std::span<const int> group) {
  double sum = 0.0;
  for (int t : group) sum += per_task_losses[static_cast<std::size_t>(t)];
  return sum;
}

DependencyMatrixView dependency_view(const ModelParameters& params) {
  if (params.config.variant != Variant::dependency_matrix) {
    throw ValidationError("dependency_view requires the dependency_matrix variant");
  }
  DependencyMatrixView view;
  for (int t = 0; t < kNumDims; ++t) {
    for (int j = 0; j < kNumDims; ++j) {
      double v = sigmoid(params.dep_raw.at(static_cast<std::size_t>(t),
                                           static_cast<std::size_t>(j)));
      // The sigmoid saturates to exactly 0/1 in doubles around |raw| > 37;
      // keep the reported gate strictly inside (0,1).
      v = std::min(std::nextafter(1.0, 0.0), std::max(std::nextafter(0.0, 1.0), v));
      view.values[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] = v;
    }
  }
  return view;
}

std::string format_dependency_view(const DependencyMatrixView& view) {
  std::string out = "influenced\\influencing";
  for (int j = 0; j < kNumDims; ++j) {
    out += "  ";
    out += std::string(dimension(j).name);
  }
  out += '\n';
  char buf[32];
  for (int t = 0; t < kNumDims; ++t) {
    out += std::string(dimension(t).name);
    for (int j = 0; j < kNumDims; ++j) {
      std::snprintf(buf, sizeof(buf), "  %.4f",
                    view.values[static_cast<std::size_t>(t)]
                               [static_cast<std::size_t>(j)]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

namespace {

json tensor_to_json(const Tensor& t) {
  return json{{"rows", t.rows}, {"cols", t.cols}, {"data", t.v}};
}

Tensor tensor_from_json(const json& j) {
  Tensor t(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  t.v = j.at("data").get<std::vector<double>>();
  if (t.v.size() != t.rows * t.cols) {
    throw ValidationError("checkpoint tensor shape mismatch");
  }
  return t;
}

json config_to_json(const ModelConfig& c) {
  return json{
      {"variant", std::string(variant_name(c.variant))},
      {"hidden_dim", c.hidden_dim},
      {"task_embed_dim", c.task_embed_dim},
      {"focal_gamma", c.focal_gamma},
      {"focal_alpha_mode",
       c.focal_alpha.mode == FocalAlphaSpec::Mode::inverse_frequency
           ? "inverse_frequency"
           : "fixed"},
      {"focal_alpha_value", c.focal_alpha.fixed_value},
      {"epochs", c.epochs},
      {"input_mode", std::string(input_mode_name(c.input_mode))},
      {"zero_dependency_diagonal", c.zero_dependency_diagonal},
  };
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  auto v = variant_from_name(j.at("variant").get<std::string>());
  if (!v) throw ValidationError("checkpoint has unknown variant");
  c.variant = *v;
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.task_embed_dim = j.at("task_embed_dim").get<int>();
  c.focal_gamma = j.at("focal_gamma").get<double>();
  c.focal_alpha.mode =
      j.at("focal_alpha_mode").get<std::string>() == "fixed"
          ? FocalAlphaSpec::Mode::fixed
          : FocalAlphaSpec::Mode::inverse_frequency;
  c.focal_alpha.fixed_value = j.at("focal_alpha_value").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.input_mode = j.at("input_mode").get<std::string>() == "cs_plus_hs"
                     ? InputMode::cs_plus_hs
                     : InputMode::cs_only;
  c.zero_dependency_diagonal = j.at("zero_dependency_diagonal").get<bool>();
  return c;
}

}  // namespace

void save_checkpoint(const ModelParameters& params, const std::string& path) {
  json j;
  j["format_version"] = 1;
  json dims = json::array();
  for (int i = 0; i < kNumDims; ++i) dims.push_back(std::string(dimension(i).name));
  j["schema"] = dims;
  j["config"] = config_to_json(params.config);
  j["feature_dim"] = params.feature_dim;
  json alpha = json::array();
  for (const auto& row : params.focal_alpha) alpha.push_back(row);
  j["focal_alpha"] = alpha;
  json tensors = json::object();
  auto names = tensor_names(params);
  auto list = tensor_list(params);
  for (std::size_t i = 0; i < list.size(); ++i) {
    tensors[names[i]] = tensor_to_json(*list[i]);
  }
  j["tensors"] = tensors;

  std::ofstream out(path);
  if (!out) throw ExecutionError("cannot write checkpoint: " + path);
  out << j.dump(2) << '\n';
}

ModelParameters load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed checkpoint " + path + ": " + e.what());
  }
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1) {
    throw ValidationError("unsupported checkpoint version in " + path);
  }
  ModelParameters p =
      init_parameters(config_from_json(j.at("config")),
                      j.at("feature_dim").get<int>(), /*seed=*/0);
  auto alpha = j.at("focal_alpha");
  for (int t = 0; t < kNumDims; ++t) {
    auto row = alpha.at(static_cast<std::size_t>(t)).get<std::vector<double>>();
    for (std::size_t c = 0; c < 3 && c < row.size(); ++c) {
      p.focal_alpha[static_cast<std::size_t>(t)][c] = row[c];
    }
  }
  auto names = tensor_names(p);
  auto list = tensor_list(p);
  for (std::size_t i = 0; i < list.size(); ++i) {
    Tensor loaded = tensor_from_json(j.at("tensors").at(names[i]));
    if (loaded.rows != list[i]->rows || loaded.cols != list[i]->cols) {
      throw ValidationError("checkpoint tensor '" + names[i] +
                            "' has unexpected shape");
    }
    *list[i] = std::move(loaded);
  }
  return p;
}

}  // namespace cseval
