#include "cseval/eval.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

namespace cseval {

using nlohmann::json;

std::string_view averaging_name(Averaging a) {
  switch (a) {
    case Averaging::weighted: return "weighted";
    case Averaging::macro_classes: return "macro";
    case Averaging::positive_class: return "positive_class";
  }
  return "?";
}

double f1_dimension(std::span<const int> preds, std::span<const int> gold,
                    DimKind kind, Averaging averaging) {
  if (preds.size() != gold.size()) {
    throw ValidationError("f1_dimension: preds and gold differ in length");
  }
  if (preds.empty()) {
    throw ValidationError("f1_dimension: empty input");
  }
  const int lo = kind == DimKind::binary ? 0 : 1;
  const int k = kind == DimKind::binary ? 2 : 3;
  if (averaging == Averaging::positive_class && kind != DimKind::binary) {
    throw ValidationError("positive_class averaging applies to binary dimensions only");
  }

  std::array<double, 3> tp{}, fp{}, fn{}, support{};
  for (std::size_t i = 0; i < preds.size(); ++i) {
    int p = preds[i] - lo;
    int g = gold[i] - lo;
    if (p < 0 || p >= k || g < 0 || g >= k) {
      throw ValidationError("f1_dimension: label value out of range");
    }
    support[static_cast<std::size_t>(g)] += 1.0;
    if (p == g) {
      tp[static_cast<std::size_t>(g)] += 1.0;
    } else {
      fp[static_cast<std::size_t>(p)] += 1.0;
      fn[static_cast<std::size_t>(g)] += 1.0;
    }
  }

  auto class_f1 = [&](int c) {
    std::size_t ci = static_cast<std::size_t>(c);
    double denom_p = tp[ci] + fp[ci];
    double denom_r = tp[ci] + fn[ci];
    double prec = denom_p > 0.0 ? tp[ci] / denom_p : 0.0;
    double rec = denom_r > 0.0 ? tp[ci] / denom_r : 0.0;
    return prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  };

  if (averaging == Averaging::positive_class) {
    return class_f1(1);
  }

  double weighted_sum = 0.0, support_sum = 0.0, macro_sum = 0.0;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    double s = support[static_cast<std::size_t>(c)];
    if (s == 0.0) continue;  // absent from gold: zero weight
    double f1 = class_f1(c);
    weighted_sum += s * f1;
    support_sum += s;
    macro_sum += f1;
    ++present;
  }
  if (averaging == Averaging::weighted) {
    return weighted_sum / support_sum;
  }
  return macro_sum / static_cast<double>(present);
}

DimensionScores score_dimensions(std::span<const LabelVector> preds,
                                 std::span<const LabelVector> gold,
                                 Averaging averaging) {
  if (preds.size() != gold.size()) {
    throw ValidationError("score_dimensions: preds and gold differ in length");
  }
  DimensionScores scores;
  std::vector<int> p(preds.size()), g(preds.size());
  double sum = 0.0;
  for (int t = 0; t < kNumDims; ++t) {
    for (std::size_t i = 0; i < preds.size(); ++i) {
      p[i] = preds[i][t];
      g[i] = gold[i][t];
    }
    double f1 = f1_dimension(p, g, dimension(t).kind, averaging);
    scores.f1[static_cast<std::size_t>(t)] = f1;
    sum += f1;
  }
  scores.macro_avg = sum / static_cast<double>(kNumDims);
  return scores;
}

MeanStd aggregate_runs(std::span<const double> per_seed) {
  if (per_seed.empty()) {
    throw ValidationError("aggregate_runs: no values");
  }
  MeanStd ms;
  double sum = 0.0;
  for (double v : per_seed) sum += v;
  ms.mean = sum / static_cast<double>(per_seed.size());
  if (per_seed.size() == 1) {
    ms.std = 0.0;
    ms.single_run = true;
    return ms;
  }
  double ss = 0.0;
  for (double v : per_seed) ss += (v - ms.mean) * (v - ms.mean);
  ms.std = std::sqrt(ss / static_cast<double>(per_seed.size() - 1));
  return ms;
}

std::string format_mean_std(const MeanStd& ms) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", ms.mean, ms.std);
  return buf;
}

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::combined: return "combined";
    case Protocol::conan_to_twitter: return "conan_to_twitter";
    case Protocol::twitter_to_conan: return "twitter_to_conan";
    case Protocol::in_twitter: return "in_twitter";
    case Protocol::in_conan: return "in_conan";
  }
  return "?";
}

std::optional<Protocol> protocol_from_name(std::string_view name) {
  for (Protocol p : {Protocol::combined, Protocol::conan_to_twitter,
                     Protocol::twitter_to_conan, Protocol::in_twitter,
                     Protocol::in_conan}) {
    if (protocol_name(p) == name) return p;
  }
  return std::nullopt;
}

AggregateScores aggregate_report(const RunReport& report, Averaging averaging) {
  if (report.runs.empty()) {
    throw ValidationError("aggregate_report: report has no runs");
  }
  AggregateScores agg;
  std::vector<double> values(report.runs.size());
  for (int t = 0; t < kNumDims; ++t) {
    for (std::size_t r = 0; r < report.runs.size(); ++r) {
      const auto& ds = averaging == Averaging::macro_classes
                           ? report.runs[r].macro_cls
                           : report.runs[r].weighted;
      values[r] = ds.f1[static_cast<std::size_t>(t)];
    }
    agg.f1[static_cast<std::size_t>(t)] = aggregate_runs(values);
  }
  auto macro = per_seed_macro(report, averaging);
  agg.macro_avg = aggregate_runs(macro);
  return agg;
}

std::vector<double> per_seed_macro(const RunReport& report, Averaging averaging) {
  std::vector<double> values;
  for (const auto& run : report.runs) {
    values.push_back(averaging == Averaging::macro_classes
                         ? run.macro_cls.macro_avg
                         : run.weighted.macro_avg);
  }
  return values;
}

namespace {

json scores_to_json(const DimensionScores& ds) {
  json obj = json::object();
  for (int t = 0; t < kNumDims; ++t) {
    obj[std::string(dimension(t).name)] = ds.f1[static_cast<std::size_t>(t)];
  }
  obj["macro_avg"] = ds.macro_avg;
  return obj;
}

DimensionScores scores_from_json(const json& obj) {
  DimensionScores ds;
  for (int t = 0; t < kNumDims; ++t) {
    ds.f1[static_cast<std::size_t>(t)] =
        obj.at(std::string(dimension(t).name)).get<double>();
  }
  ds.macro_avg = obj.at("macro_avg").get<double>();
  return ds;
}

}  // namespace

std::string report_to_records(const RunReport& report) {
  std::string out;
  for (const auto& run : report.runs) {
    json rec;
    rec["type"] = "seed_scores";
    rec["variant"] = std::string(variant_name(report.variant));
    rec["protocol"] = std::string(protocol_name(report.protocol));
    rec["input_mode"] = std::string(input_mode_name(report.input_mode));
    rec["seed"] = run.seed;
    rec["f1_weighted"] = scores_to_json(run.weighted);
    rec["f1_macro"] = scores_to_json(run.macro_cls);
    json pos = json::object();
    pos[std::string(dimension(0).name)] = run.positive[0];
    pos[std::string(dimension(1).name)] = run.positive[1];
    rec["f1_positive_class"] = pos;
    out += rec.dump();
    out += '\n';
  }
  for (Averaging avg : {Averaging::weighted, Averaging::macro_classes}) {
    AggregateScores agg = aggregate_report(report, avg);
    json rec;
    rec["type"] = "aggregate";
    rec["variant"] = std::string(variant_name(report.variant));
    rec["protocol"] = std::string(protocol_name(report.protocol));
    rec["input_mode"] = std::string(input_mode_name(report.input_mode));
    rec["averaging"] = std::string(averaging_name(avg));
    json seeds = json::array();
    for (const auto& run : report.runs) seeds.push_back(run.seed);
    rec["seeds"] = seeds;
    json mean = json::object(), sd = json::object();
    for (int t = 0; t < kNumDims; ++t) {
      mean[std::string(dimension(t).name)] =
          agg.f1[static_cast<std::size_t>(t)].mean;
      sd[std::string(dimension(t).name)] = agg.f1[static_cast<std::size_t>(t)].std;
    }
    mean["macro_avg"] = agg.macro_avg.mean;
    sd["macro_avg"] = agg.macro_avg.std;
    rec["mean"] = mean;
    rec["std"] = sd;
    rec["single_run"] = agg.macro_avg.single_run;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::vector<RunReport> parse_run_reports(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open report file: " + path);
  std::map<std::pair<std::string, std::string>, RunReport> grouped;
  std::vector<std::pair<std::string, std::string>> order;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": malformed record: " + e.what());
    }
    if (rec.value("type", "") != "seed_scores") continue;
    auto variant = variant_from_name(rec.at("variant").get<std::string>());
    auto protocol = protocol_from_name(rec.at("protocol").get<std::string>());
    if (!variant || !protocol) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": unknown variant or protocol");
    }
    auto key = std::make_pair(rec.at("variant").get<std::string>(),
                              rec.at("protocol").get<std::string>());
    if (!grouped.count(key)) {
      RunReport rep;
      rep.variant = *variant;
      rep.protocol = *protocol;
      rep.input_mode = rec.value("input_mode", "cs_only") == "cs_plus_hs"
                           ? InputMode::cs_plus_hs
                           : InputMode::cs_only;
      grouped[key] = rep;
      order.push_back(key);
    }
    SeedScores run;
    run.seed = rec.at("seed").get<std::uint64_t>();
    run.weighted = scores_from_json(rec.at("f1_weighted"));
    run.macro_cls = scores_from_json(rec.at("f1_macro"));
    const auto& pos = rec.at("f1_positive_class");
    run.positive[0] = pos.at(std::string(dimension(0).name)).get<double>();
    run.positive[1] = pos.at(std::string(dimension(1).name)).get<double>();
    grouped[key].runs.push_back(run);
  }
  std::vector<RunReport> reports;
  for (const auto& key : order) reports.push_back(grouped[key]);
  return reports;
}

std::string format_report_grid(std::span<const RunReport> reports,
                               Averaging averaging) {
  static const char* kCols[kNumDims] = {"emo.",  "aud.",  "clar.",
                                        "evid.", "rebut.", "fair."};
  std::string out;
  char buf[64];
  if (!reports.empty()) {
    out += "protocol: " + std::string(protocol_name(reports[0].protocol));
    out += "  (" + std::string(averaging_name(averaging)) + " F1, mean ± std)\n";
  }
  std::snprintf(buf, sizeof(buf), "%-22s", "model");
  out += buf;
  for (const char* c : kCols) {
    std::snprintf(buf, sizeof(buf), " %12s", c);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), " %12s\n", "AVG");
  out += buf;
  for (const auto& report : reports) {
    AggregateScores agg = aggregate_report(report, averaging);
    std::snprintf(buf, sizeof(buf), "%-22s",
                  std::string(variant_name(report.variant)).c_str());
    out += buf;
    for (int t = 0; t < kNumDims; ++t) {
      std::snprintf(buf, sizeof(buf), " %12s",
                    format_mean_std(agg.f1[static_cast<std::size_t>(t)]).c_str());
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), " %12s\n",
                  format_mean_std(agg.macro_avg).c_str());
    out += buf;
  }
  return out;
}

}  // namespace cseval
