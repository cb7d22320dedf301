#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cseval/experiment.hpp"
#include "cseval/synthetic.hpp"

using namespace cseval;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("cseval_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string base_config(const std::string& extra = "") {
  return R"({
  "version": 1,
  "corpora": {"conan": "conan.jsonl", "twitter": "twitter.jsonl"},
  "protocol": "combined",
  "variants": ["multitask_united", "dependency_matrix"],
  "seeds": [42, 0],
  "encoder": {"max_tokens": 32, "feature_dim": 128, "ngram_orders": [1], "input_mode": "cs_only"},
  "model": {"hidden_dim": 8, "task_embed_dim": 4, "epochs": 1},
  "train": {"learning_rate": 0.002, "batch_size": 16, "optimizer": "adam"},
  "split": {"train": 0.7, "val": 0.1, "test": 0.2},
  "output_dir": "out")" +
         extra + "\n}\n";
}

void write_corpora(const TempDir& dir) {
  write_corpus(make_separable_corpus(60, 96, 11, Source::conan),
               (dir.path / "conan.jsonl").string());
  write_corpus(make_separable_corpus(30, 96, 12, Source::twitter),
               (dir.path / "twitter.jsonl").string());
}

}  // namespace

TEST_CASE("config validation names offending fields") {
  TempDir dir("cfg");
  write_corpora(dir);

  SUBCASE("duplicate seeds") {
    write_file(dir.path / "c.json",
               R"({"version":1,"corpora":{"conan":"conan.jsonl"},"seeds":[42,42],"output_dir":"out"})");
    CHECK_THROWS_WITH_AS(load_experiment_config((dir.path / "c.json").string()),
                         doctest::Contains("seeds"), ValidationError);
  }
  SUBCASE("unknown key") {
    write_file(dir.path / "c.json",
               R"({"version":1,"corpora":{"conan":"conan.jsonl"},"learning_rate":0.1,"output_dir":"out"})");
    CHECK_THROWS_WITH_AS(load_experiment_config((dir.path / "c.json").string()),
                         doctest::Contains("unknown key"), ValidationError);
  }
  SUBCASE("unknown variant") {
    write_file(dir.path / "c.json",
               R"({"version":1,"corpora":{"conan":"conan.jsonl"},"variants":["bert"],"output_dir":"out"})");
    CHECK_THROWS_WITH_AS(load_experiment_config((dir.path / "c.json").string()),
                         doctest::Contains("variant"), ValidationError);
  }
  SUBCASE("bad version") {
    write_file(dir.path / "c.json", R"({"version":2,"corpora":{"conan":"x"}})");
    CHECK_THROWS_WITH_AS(load_experiment_config((dir.path / "c.json").string()),
                         doctest::Contains("version"), ValidationError);
  }
  SUBCASE("bad fraction") {
    write_file(
        dir.path / "c.json",
        R"({"version":1,"corpora":{"conan":"conan.jsonl"},"split":{"train":0.9,"val":0.3,"test":0.2},"output_dir":"out"})");
    CHECK_THROWS_WITH_AS(load_experiment_config((dir.path / "c.json").string()),
                         doctest::Contains("sum to 1"), ValidationError);
  }
  SUBCASE("valid config loads with defaults") {
    write_file(dir.path / "c.json", base_config());
    ExperimentConfig config =
        load_experiment_config((dir.path / "c.json").string());
    CHECK(config.protocol == Protocol::combined);
    CHECK(config.variants.size() == 2);
    CHECK(config.seeds == std::vector<std::uint64_t>{42, 0});
    CHECK(config.model.epochs == 1);
    CHECK(config.train.epochs == 1);
    // Relative paths resolve against the config directory.
    CHECK(fs::path(*config.conan_path).parent_path() == dir.path);
  }
}

TEST_CASE("plan_protocol shapes") {
  Corpus conan = make_separable_corpus(40, 96, 21, Source::conan);
  Corpus twitter = make_separable_corpus(20, 96, 22, Source::twitter);
  SplitSpec fractions;

  SUBCASE("combined splits the merged corpus") {
    ProtocolData data =
        plan_protocol(Protocol::combined, &conan, &twitter, fractions, 42);
    CHECK(data.train.size() == 42);  // floor(60*0.7)
    CHECK(data.val.size() == 6);
    CHECK(data.test.size() == 12);
  }
  SUBCASE("cross-domain tests on the full target corpus") {
    ProtocolData data = plan_protocol(Protocol::conan_to_twitter, &conan,
                                      &twitter, fractions, 42);
    CHECK(data.test.size() == twitter.size());
    CHECK(data.train.size() + data.val.size() == conan.size());
    ProtocolData rev = plan_protocol(Protocol::twitter_to_conan, &conan,
                                     &twitter, fractions, 42);
    CHECK(rev.test.size() == conan.size());
    CHECK(rev.train.size() + rev.val.size() == twitter.size());
  }
  SUBCASE("in-domain splits a single corpus") {
    ProtocolData data =
        plan_protocol(Protocol::in_conan, &conan, &twitter, fractions, 0);
    CHECK(data.train.size() + data.val.size() + data.test.size() == conan.size());
    ProtocolData tw =
        plan_protocol(Protocol::in_twitter, nullptr, &twitter, fractions, 0);
    CHECK(tw.train.size() + tw.val.size() + tw.test.size() == twitter.size());
  }
  SUBCASE("missing corpus is a validation error") {
    CHECK_THROWS_WITH_AS(
        plan_protocol(Protocol::combined, &conan, nullptr, fractions, 1),
        doctest::Contains("twitter"), ValidationError);
    CHECK_THROWS_AS(
        plan_protocol(Protocol::in_conan, nullptr, &twitter, fractions, 1),
        ValidationError);
  }
  SUBCASE("test ids never appear in train or val") {
    for (std::uint64_t seed : {42ULL, 0ULL, 1ULL}) {
      ProtocolData data =
          plan_protocol(Protocol::combined, &conan, &twitter, fractions, seed);
      std::set<std::string> test_ids;
      for (const auto& p : data.test.pairs) test_ids.insert(p.id);
      for (const auto& p : data.train.pairs) CHECK(test_ids.count(p.id) == 0);
      for (const auto& p : data.val.pairs) CHECK(test_ids.count(p.id) == 0);
    }
  }
}

TEST_CASE("run_experiment writes deterministic outputs") {
  TempDir dir("run");
  write_corpora(dir);
  write_file(dir.path / "config.json", base_config());
  ExperimentConfig config =
      load_experiment_config((dir.path / "config.json").string());

  std::string summary1 = run_experiment(config);
  CHECK(summary1.find("multitask_united") != std::string::npos);
  CHECK(summary1.find("dependency_matrix") != std::string::npos);
  CHECK(summary1.find("AVG") != std::string::npos);

  fs::path out = dir.path / "out";
  CHECK(fs::exists(out / "reports" / "multitask_united_combined.jsonl"));
  CHECK(fs::exists(out / "reports" / "dependency_matrix_combined.jsonl"));
  CHECK(fs::exists(out / "reports" / "summary.txt"));
  CHECK(fs::exists(out / "checkpoints" / "multitask_united_combined_seed42.json"));
  CHECK(fs::exists(out / "matrices" / "dependency_matrix_combined_seed0.txt"));
  CHECK(fs::exists(out / "logs" / "multitask_united_combined_seed42_history.txt"));
  // No matrix export for non-dependency variants.
  CHECK_FALSE(fs::exists(out / "matrices" / "multitask_united_combined_seed42.txt"));

  std::string report1 =
      read_file(out / "reports" / "dependency_matrix_combined.jsonl");
  std::string matrix1 =
      read_file(out / "matrices" / "dependency_matrix_combined_seed42.txt");

  std::string summary2 = run_experiment(config);
  CHECK(summary1 == summary2);
  CHECK(report1 == read_file(out / "reports" / "dependency_matrix_combined.jsonl"));
  CHECK(matrix1 == read_file(out / "matrices" / "dependency_matrix_combined_seed42.txt"));

  // Reports parse back and carry both seeds.
  auto reports =
      parse_run_reports((out / "reports" / "multitask_united_combined.jsonl").string());
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].runs.size() == 2);
}

TEST_CASE("run_iaa emits panel and pairwise reports per dimension") {
  TempDir dir("iaa");
  std::string data;
  for (int i = 0; i < 12; ++i) {
    for (const char* ann : {"ann1", "ann2", "ann3"}) {
      for (int d = 0; d < kNumDims; ++d) {
        const auto& dim = dimension(d);
        int value = dim.min_value + (i + d) % dim.num_classes();
        data += R"({"item_id":"i)" + std::to_string(i) +
                R"(","annotator_id":")" + ann + R"(","dimension":")" +
                std::string(dim.name) + R"(","value":)" +
                std::to_string(value) + "}\n";
      }
    }
  }
  write_file(dir.path / "ann.jsonl", data);

  std::string jsonl = run_iaa({(dir.path / "ann.jsonl").string()}, {},
                              AlphaLevel::nominal, EmitMode::jsonl);
  std::size_t records = 0;
  for (char c : jsonl) records += c == '\n';
  CHECK(records == kNumDims * 4);  // 1 panel + 3 pairwise per dimension

  std::string text = run_iaa({(dir.path / "ann.jsonl").string()}, {},
                             AlphaLevel::nominal, EmitMode::text);
  // Perfect agreement fixture: all metrics 1.00.
  CHECK(text.find("1.00") != std::string::npos);
  CHECK(text.find("fleiss_kappa") != std::string::npos);
  CHECK(text.find("krippendorff_alpha") != std::string::npos);
  CHECK(text.find("percent_agreement") != std::string::npos);
  CHECK(text.find("ann1&ann2") != std::string::npos);
}

TEST_CASE("run_iaa rejects out-of-range values naming the record") {
  TempDir dir("iaa_bad");
  write_file(dir.path / "ann.jsonl",
             R"({"item_id":"i0","annotator_id":"a1","dimension":"emotional_appeal","value":3})"
             "\n");
  CHECK_THROWS_WITH_AS(run_iaa({(dir.path / "ann.jsonl").string()}, {},
                               AlphaLevel::nominal, EmitMode::text),
                       doctest::Contains("out of range"), ValidationError);
}

namespace {

RunReport fake_report(Variant variant, const std::vector<double>& macro_by_seed) {
  RunReport report;
  report.variant = variant;
  report.protocol = Protocol::combined;
  std::vector<std::uint64_t> seeds{42, 0, 1, 2, 3};
  for (std::size_t i = 0; i < macro_by_seed.size(); ++i) {
    SeedScores run;
    run.seed = seeds[i];
    for (int t = 0; t < kNumDims; ++t) {
      run.weighted.f1[static_cast<std::size_t>(t)] = macro_by_seed[i];
      run.macro_cls.f1[static_cast<std::size_t>(t)] = macro_by_seed[i];
    }
    run.weighted.macro_avg = macro_by_seed[i];
    run.macro_cls.macro_avg = macro_by_seed[i];
    report.runs.push_back(run);
  }
  return report;
}

}  // namespace

TEST_CASE("run_stats shapes and errors") {
  TempDir dir("stats");
  auto write_report = [&](const std::string& name, const RunReport& report) {
    write_file(dir.path / name, report_to_records(report));
    return (dir.path / name).string();
  };

  std::vector<std::string> paths;
  paths.push_back(write_report(
      "a.jsonl", fake_report(Variant::independent, {0.70, 0.72, 0.71, 0.69, 0.73})));
  paths.push_back(write_report(
      "b.jsonl",
      fake_report(Variant::multitask_divided, {0.80, 0.82, 0.81, 0.79, 0.83})));
  paths.push_back(write_report(
      "c.jsonl",
      fake_report(Variant::multitask_united, {0.78, 0.80, 0.79, 0.77, 0.81})));
  paths.push_back(write_report(
      "d.jsonl",
      fake_report(Variant::dependency_matrix, {0.90, 0.92, 0.91, 0.89, 0.93})));

  std::string text = run_stats(paths, "dependency_matrix", TTestVariant::student,
                               EmitMode::text);
  CHECK(text.find("anova_oneway") != std::string::npos);
  CHECK(text.find("independent") != std::string::npos);
  std::size_t pairwise_lines = 0;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.find("  ") == 0 && line.find("t = ") != std::string::npos) {
      ++pairwise_lines;
    }
  }
  CHECK(pairwise_lines == 3);
  CHECK(text.find("no multiple-comparison correction") != std::string::npos);

  SUBCASE("single report is rejected") {
    CHECK_THROWS_WITH_AS(run_stats({paths[0]}, "independent",
                                   TTestVariant::student, EmitMode::text),
                         doctest::Contains("at least 2"), ValidationError);
  }
  SUBCASE("seed mismatch is rejected") {
    RunReport bad = fake_report(Variant::multitask_united, {0.5, 0.6});
    auto bad_path = write_report("bad.jsonl", bad);
    CHECK_THROWS_WITH_AS(
        run_stats({paths[0], bad_path}, "independent", TTestVariant::student,
                  EmitMode::text),
        doctest::Contains("seed set"), ValidationError);
  }
  SUBCASE("identical reports give p = 1") {
    auto p1 = write_report("same1.jsonl",
                           fake_report(Variant::independent,
                                       {0.70, 0.72, 0.71, 0.69, 0.73}));
    RunReport same = fake_report(Variant::multitask_united,
                                 {0.70, 0.72, 0.71, 0.69, 0.73});
    auto p2 = write_report("same2.jsonl", same);
    std::string out =
        run_stats({p1, p2}, "independent", TTestVariant::student, EmitMode::text);
    CHECK(out.find("p = 1.000000") != std::string::npos);
  }
}
