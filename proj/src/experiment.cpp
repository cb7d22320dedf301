#include "cseval/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

namespace cseval {

namespace fs = std::filesystem;
using nlohmann::json;

void ExperimentConfig::validate() const {
  if (!combined_path && !conan_path && !twitter_path) {
    throw ValidationError("config.corpora must name at least one corpus file");
  }
  if (combined_path && (conan_path || twitter_path)) {
    throw ValidationError(
        "config.corpora: give either 'combined' or per-source paths, not both");
  }
  if (variants.empty()) {
    throw ValidationError("config.variants must not be empty");
  }
  std::set<Variant> vset(variants.begin(), variants.end());
  if (vset.size() != variants.size()) {
    throw ValidationError("config.variants contains duplicates");
  }
  if (seeds.empty()) {
    throw ValidationError("config.seeds must not be empty");
  }
  std::set<std::uint64_t> sset(seeds.begin(), seeds.end());
  if (sset.size() != seeds.size()) {
    throw ValidationError("config.seeds contains duplicates");
  }
  if (output_dir.empty()) {
    throw ValidationError("config.output_dir must not be empty");
  }
  encoder.validate();
  model.validate();
  train.validate();
  split.validate();
}

namespace {

void check_known_keys(const json& obj, const std::set<std::string>& known,
                      const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw ValidationError("config." + where + ": unknown key '" + it.key() + "'");
    }
  }
}

std::string resolve(const fs::path& base, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return p.string();
  return (base / p).string();
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed config " + path + ": " + e.what());
  }
  const fs::path base = fs::path(path).parent_path();

  check_known_keys(j, {"version", "corpora", "protocol", "variants", "seeds",
                       "encoder", "model", "train", "split", "output_dir"},
                   "");
  if (!j.contains("version") || !j["version"].is_number_integer() ||
      j["version"].get<int>() != 1) {
    throw ValidationError("config.version must be 1");
  }

  ExperimentConfig config;
  if (j.contains("corpora")) {
    const auto& c = j["corpora"];
    check_known_keys(c, {"conan", "twitter", "combined"}, "corpora");
    if (c.contains("conan")) {
      config.conan_path = resolve(base, c["conan"].get<std::string>());
    }
    if (c.contains("twitter")) {
      config.twitter_path = resolve(base, c["twitter"].get<std::string>());
    }
    if (c.contains("combined")) {
      config.combined_path = resolve(base, c["combined"].get<std::string>());
    }
  }
  if (j.contains("protocol")) {
    auto p = protocol_from_name(j["protocol"].get<std::string>());
    if (!p) {
      throw ValidationError("config.protocol: unknown protocol '" +
                            j["protocol"].get<std::string>() + "'");
    }
    config.protocol = *p;
  }
  if (j.contains("variants")) {
    config.variants.clear();
    for (const auto& v : j["variants"]) {
      auto variant = variant_from_name(v.get<std::string>());
      if (!variant) {
        throw ValidationError("config.variants: unknown variant '" +
                              v.get<std::string>() + "'");
      }
      config.variants.push_back(*variant);
    }
  }
  if (j.contains("seeds")) {
    config.seeds.clear();
    for (const auto& s : j["seeds"]) {
      if (!s.is_number_unsigned() && !s.is_number_integer()) {
        throw ValidationError("config.seeds entries must be non-negative integers");
      }
      if (s.is_number_integer() && s.get<std::int64_t>() < 0) {
        throw ValidationError("config.seeds entries must be non-negative");
      }
      config.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (j.contains("encoder")) {
    const auto& e = j["encoder"];
    check_known_keys(e, {"max_tokens", "feature_dim", "ngram_orders", "input_mode"},
                     "encoder");
    if (e.contains("max_tokens")) config.encoder.max_tokens = e["max_tokens"].get<int>();
    if (e.contains("feature_dim")) config.encoder.feature_dim = e["feature_dim"].get<int>();
    if (e.contains("ngram_orders")) {
      config.encoder.ngram_orders.clear();
      for (const auto& k : e["ngram_orders"]) {
        config.encoder.ngram_orders.insert(k.get<int>());
      }
    }
    if (e.contains("input_mode")) {
      std::string mode = e["input_mode"].get<std::string>();
      if (mode != "cs_only" && mode != "cs_plus_hs") {
        throw ValidationError("config.encoder.input_mode must be cs_only or cs_plus_hs");
      }
      config.encoder.input_mode =
          mode == "cs_only" ? InputMode::cs_only : InputMode::cs_plus_hs;
    }
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    check_known_keys(m,
                     {"hidden_dim", "task_embed_dim", "focal_gamma", "focal_alpha",
                      "epochs", "zero_dependency_diagonal"},
                     "model");
    if (m.contains("hidden_dim")) config.model.hidden_dim = m["hidden_dim"].get<int>();
    if (m.contains("task_embed_dim")) {
      config.model.task_embed_dim = m["task_embed_dim"].get<int>();
    }
    if (m.contains("focal_gamma")) {
      config.model.focal_gamma = m["focal_gamma"].get<double>();
    }
    if (m.contains("focal_alpha")) {
      if (m["focal_alpha"].is_string()) {
        if (m["focal_alpha"].get<std::string>() != "inverse_frequency") {
          throw ValidationError(
              "config.model.focal_alpha must be 'inverse_frequency' or a number");
        }
        config.model.focal_alpha.mode = FocalAlphaSpec::Mode::inverse_frequency;
      } else {
        config.model.focal_alpha.mode = FocalAlphaSpec::Mode::fixed;
        config.model.focal_alpha.fixed_value = m["focal_alpha"].get<double>();
      }
    }
    if (m.contains("epochs")) config.model.epochs = m["epochs"].get<int>();
    if (m.contains("zero_dependency_diagonal")) {
      config.model.zero_dependency_diagonal =
          m["zero_dependency_diagonal"].get<bool>();
    }
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    check_known_keys(t, {"learning_rate", "batch_size", "optimizer"}, "train");
    if (t.contains("learning_rate")) {
      config.train.learning_rate = t["learning_rate"].get<double>();
    }
    if (t.contains("batch_size")) config.train.batch_size = t["batch_size"].get<int>();
    if (t.contains("optimizer")) {
      std::string opt = t["optimizer"].get<std::string>();
      if (opt == "adam") {
        config.train.optimizer = TrainConfig::Optimizer::adam;
      } else if (opt == "sgd") {
        config.train.optimizer = TrainConfig::Optimizer::sgd;
      } else {
        throw ValidationError("config.train.optimizer must be adam or sgd");
      }
    }
  }
  if (j.contains("split")) {
    const auto& s = j["split"];
    check_known_keys(s, {"train", "val", "test"}, "split");
    if (s.contains("train")) config.split.train_fraction = s["train"].get<double>();
    if (s.contains("val")) config.split.val_fraction = s["val"].get<double>();
    if (s.contains("test")) config.split.test_fraction = s["test"].get<double>();
  }
  if (j.contains("output_dir")) {
    config.output_dir = resolve(base, j["output_dir"].get<std::string>());
  } else {
    config.output_dir = resolve(base, config.output_dir);
  }
  config.train.epochs = config.model.epochs;
  config.validate();
  return config;
}

namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ExecutionError("cannot write " + path.string());
  out << content;
}

std::string history_records(const RunReport& report, std::uint64_t seed,
                            const TrainHistory& history) {
  std::string out;
  for (std::size_t e = 0; e < history.epochs.size(); ++e) {
    json rec;
    rec["type"] = "epoch";
    rec["variant"] = std::string(variant_name(report.variant));
    rec["protocol"] = std::string(protocol_name(report.protocol));
    rec["seed"] = seed;
    rec["epoch"] = e + 1;
    json losses = json::object();
    for (int t = 0; t < kNumDims; ++t) {
      losses[std::string(dimension(t).name)] =
          history.epochs[e].mean_task_loss[static_cast<std::size_t>(t)];
    }
    rec["mean_task_loss"] = losses;
    rec["val_macro_f1"] = history.epochs[e].val_macro_f1;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

}  // namespace

std::string run_experiment(const ExperimentConfig& config) {
  config.validate();

  std::optional<Corpus> conan, twitter;
  if (config.combined_path) {
    Corpus combined = parse_corpus(*config.combined_path);
    conan = filter_by_source(combined, Source::conan);
    twitter = filter_by_source(combined, Source::twitter);
  } else {
    if (config.conan_path) conan = parse_corpus(*config.conan_path);
    if (config.twitter_path) twitter = parse_corpus(*config.twitter_path);
  }

  const fs::path out(config.output_dir);
  for (const char* sub : {"reports", "checkpoints", "matrices", "logs"}) {
    std::error_code ec;
    fs::create_directories(out / sub, ec);
    if (ec) {
      throw ExecutionError("cannot create output directory " +
                           (out / sub).string() + ": " + ec.message());
    }
  }

  std::vector<RunReport> reports;
  for (Variant variant : config.variants) {
    ModelConfig model = config.model;
    model.variant = variant;
    model.input_mode = config.encoder.input_mode;
    ProtocolRunResult result = run_protocol(
        config.protocol, model, config.encoder, config.train,
        conan ? &*conan : nullptr, twitter ? &*twitter : nullptr, config.split,
        config.seeds);

    std::string stem = std::string(variant_name(variant)) + "_" +
                       std::string(protocol_name(config.protocol));
    write_text(out / "reports" / (stem + ".jsonl"),
               report_to_records(result.report));
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
      std::string seed_tag = stem + "_seed" + std::to_string(config.seeds[i]);
      save_checkpoint(result.per_seed_params[i],
                      (out / "checkpoints" / (seed_tag + ".json")).string());
      if (variant == Variant::dependency_matrix) {
        write_text(out / "matrices" / (seed_tag + ".txt"),
                   format_dependency_view(
                       dependency_view(result.per_seed_params[i])));
      }
      write_text(out / "logs" / (seed_tag + "_history.txt"),
                 format_history(result.per_seed_history[i]));
      write_text(out / "logs" / (seed_tag + "_history.jsonl"),
                 history_records(result.report, config.seeds[i],
                                 result.per_seed_history[i]));
    }
    reports.push_back(std::move(result.report));
  }

  std::string summary = format_report_grid(reports, Averaging::weighted);
  summary += '\n';
  summary += format_report_grid(reports, Averaging::macro_classes);
  summary += "\npositive-class F1 (binary dimensions, mean ± std)\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-22s %20s %20s\n", "model",
                "emotional_appeal", "audience_adaptation");
  summary += buf;
  for (const auto& report : reports) {
    std::snprintf(buf, sizeof(buf), "%-22s",
                  std::string(variant_name(report.variant)).c_str());
    summary += buf;
    for (int t = 0; t < 2; ++t) {
      std::vector<double> values;
      for (const auto& run : report.runs) {
        values.push_back(run.positive[static_cast<std::size_t>(t)]);
      }
      std::snprintf(buf, sizeof(buf), " %20s",
                    format_mean_std(aggregate_runs(values)).c_str());
      summary += buf;
    }
    summary += '\n';
  }
  write_text(out / "reports" / "summary.txt", summary);
  return summary;
}

std::string run_iaa(const std::vector<std::string>& annotation_paths,
                    const std::vector<std::string>& dimensions,
                    AlphaLevel level, EmitMode emit) {
  if (annotation_paths.empty()) {
    throw ValidationError("iaa needs at least one annotation file");
  }
  std::vector<AnnotationRecord> records;
  for (const auto& path : annotation_paths) {
    auto part = parse_annotation_records(path);
    records.insert(records.end(), part.begin(), part.end());
  }
  std::vector<int> dims;
  if (dimensions.empty()) {
    for (int d = 0; d < kNumDims; ++d) dims.push_back(d);
  } else {
    for (const auto& name : dimensions) {
      int d = dimension_index(name);
      if (d < 0) throw ValidationError("unknown dimension '" + name + "'");
      dims.push_back(d);
    }
  }

  std::string text;
  std::string jsonl;
  char buf[128];

  bool header_done = false;
  for (int d : dims) {
    AnnotationTable table = build_annotation_table(records, d);
    AgreementReport panel = designated_metric(table, level);
    auto pairs = pairwise_reports(table, level);

    if (!header_done) {
      std::snprintf(buf, sizeof(buf), "%-22s %-20s %8s", "dimension", "metric",
                    "panel");
      text += buf;
      for (const auto& pr : pairs) {
        std::string pair_name = pr.annotator_a + "&" + pr.annotator_b;
        std::snprintf(buf, sizeof(buf), " %14s", pair_name.c_str());
        text += buf;
      }
      text += '\n';
      header_done = true;
    }

    std::snprintf(buf, sizeof(buf), "%-22s %-20s %8.2f", panel.dimension.c_str(),
                  panel.metric.c_str(), panel.value);
    text += buf;
    for (const auto& pr : pairs) {
      std::snprintf(buf, sizeof(buf), " %14.2f", pr.report.value);
      text += buf;
    }
    if (panel.n_missing > 0 || panel.degenerate) {
      std::snprintf(buf, sizeof(buf), "   (dropped=%zu%s)", panel.n_missing,
                    panel.degenerate ? ", degenerate" : "");
      text += buf;
    }
    text += '\n';

    auto report_json = [&](const AgreementReport& rep, const std::string& scope) {
      json rec;
      rec["type"] = "agreement";
      rec["scope"] = scope;
      rec["dimension"] = rep.dimension;
      rec["metric"] = rep.metric;
      rec["value"] = rep.value;
      rec["n_items"] = rep.n_items;
      rec["n_annotators"] = rep.n_annotators;
      rec["n_missing"] = rep.n_missing;
      rec["degenerate"] = rep.degenerate;
      jsonl += rec.dump();
      jsonl += '\n';
    };
    report_json(panel, "panel");
    for (const auto& pr : pairs) {
      report_json(pr.report, pr.annotator_a + "&" + pr.annotator_b);
    }
  }

  switch (emit) {
    case EmitMode::text: return text;
    case EmitMode::jsonl: return jsonl;
    case EmitMode::both: return text + jsonl;
  }
  return text;
}

std::string run_stats(const std::vector<std::string>& report_paths,
                      const std::string& baseline, TTestVariant variant,
                      EmitMode emit) {
  if (report_paths.empty()) {
    throw ValidationError("stats needs at least one report file");
  }
  std::vector<RunReport> reports;
  for (const auto& path : report_paths) {
    auto part = parse_run_reports(path);
    reports.insert(reports.end(), part.begin(), part.end());
  }
  if (reports.size() < 2) {
    throw ValidationError("stats needs reports for at least 2 model variants");
  }

  // All reports must share the protocol and the seed set.
  std::vector<std::uint64_t> seed_set;
  for (const auto& run : reports[0].runs) seed_set.push_back(run.seed);
  for (const auto& report : reports) {
    if (report.protocol != reports[0].protocol) {
      throw ValidationError("stats: reports mix protocols");
    }
    std::vector<std::uint64_t> seeds;
    for (const auto& run : report.runs) seeds.push_back(run.seed);
    if (seeds != seed_set) {
      throw ValidationError("stats: report for variant " +
                            std::string(variant_name(report.variant)) +
                            " has a different seed set");
    }
  }

  std::vector<NamedSample> samples;
  std::vector<std::vector<double>> groups;
  for (const auto& report : reports) {
    NamedSample s;
    s.name = std::string(variant_name(report.variant));
    s.values = per_seed_macro(report, Averaging::weighted);
    groups.push_back(s.values);
    samples.push_back(std::move(s));
  }

  StatTestResult anova = one_way_anova(groups);
  auto pairwise = pairwise_significance(samples, baseline, variant);

  std::string text;
  std::string jsonl;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "anova_oneway: F = %.4f, df = (%g, %g), p = %.6f\n",
                anova.statistic, anova.df1, anova.df2, anova.p_value);
  text += buf;
  std::snprintf(buf, sizeof(buf), "pairwise t-tests vs %s (%s, two-sided):\n",
                baseline.c_str(),
                variant == TTestVariant::student ? "student"
                : variant == TTestVariant::welch ? "welch"
                                                 : "paired");
  text += buf;
  for (const auto& pr : pairwise) {
    std::snprintf(buf, sizeof(buf), "  %-22s t = %+.4f, df = %g, p = %.6f\n",
                  pr.model.c_str(), pr.test.statistic, pr.test.df1,
                  pr.test.p_value);
    text += buf;
  }
  text += "note: raw pairwise p-values; no multiple-comparison correction applied.\n";

  json arec;
  arec["type"] = "stat_test";
  arec["test"] = anova.test;
  arec["statistic"] = anova.statistic;
  arec["df"] = json::array({anova.df1, anova.df2});
  arec["p_value"] = anova.p_value;
  jsonl += arec.dump();
  jsonl += '\n';
  for (const auto& pr : pairwise) {
    json rec;
    rec["type"] = "stat_test";
    rec["test"] = pr.test.test;
    rec["baseline"] = baseline;
    rec["model"] = pr.model;
    rec["statistic"] = pr.test.statistic;
    rec["df"] = pr.test.df1;
    rec["p_value"] = pr.test.p_value;
    rec["correction"] = "none";
    jsonl += rec.dump();
    jsonl += '\n';
  }

  switch (emit) {
    case EmitMode::text: return text;
    case EmitMode::jsonl: return jsonl;
    case EmitMode::both: return text + jsonl;
  }
  return text;
}

}  // namespace cseval
