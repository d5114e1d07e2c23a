#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csikit/errors.hpp"
#include "csikit/pipeline.hpp"

using namespace csikit;

namespace {

errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return errc::io_error;
}

PipelineConfig synthetic_config(std::uint64_t seed) {
  PipelineConfig config;
  config.synthetic = SyntheticSpec{};
  config.seed = seed;
  return config;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("run_pipeline: synthetic default run is complete") {
  PipelineReport report = run_pipeline(synthetic_config(7));
  CHECK(report.cohort.size() == 151);
  CHECK(report.excluded_rows == 0);
  CHECK(report.pca.retained >= 1);
  CHECK(report.runs.size() == 4);
  CHECK(report.validity.size() == 4);
  CHECK(report.split.has_value());
  CHECK(report.cutoffs.size() == 3);
  CHECK(report.feature_importance.size() == 9);
  CHECK(report.cutoff_for(Subgroup::overall) != nullptr);
  CHECK(report.run_for(Algorithm::hierarchical)->dendrogram.has_value());
  CHECK(report.run_for(Algorithm::som)->som_grid.has_value());

  // every cutoff table spans the default grid
  for (const auto& c : report.cutoffs) {
    CHECK(c.table.size() == 26);
    CHECK(c.table.front().cutoff == 20);
    CHECK(c.table.back().cutoff == 45);
  }
}

TEST_CASE("run_pipeline: variance threshold 1.0 keeps all nine components") {
  PipelineConfig config = synthetic_config(3);
  config.variance_threshold = 1.0;
  PipelineReport report = run_pipeline(config);
  CHECK(report.pca.retained == 9);
}

TEST_CASE("run_pipeline: k != 3 skips split and cutoffs with markers") {
  PipelineConfig config = synthetic_config(5);
  config.k = 4;
  PipelineReport report = run_pipeline(config);
  CHECK(!report.split.has_value());
  CHECK(!report.split_skip_reason.empty());
  CHECK(report.cutoffs.empty());
  CHECK(report.cutoff_skips.size() == 3);
  // the report still serializes with explicit skip markers
  auto j = report.to_json();
  CHECK(j["split"].is_null());
  CHECK(j["cutoff_skips"].size() == 3);
}

TEST_CASE("run_pipeline: hc-vs-c mode restricts the low group to HC members of cluster A") {
  PipelineConfig ab = synthetic_config(11);
  PipelineConfig hc = synthetic_config(11);
  hc.mode = SplitMode::hc_vs_c;
  PipelineReport rab = run_pipeline(ab);
  PipelineReport rhc = run_pipeline(hc);
  REQUIRE(rab.split.has_value());
  REQUIRE(rhc.split.has_value());
  CHECK(rhc.split->high_ids == rab.split->high_ids);
  CHECK(rhc.split->low_ids.size() < rab.split->low_ids.size());

  std::map<std::string, const SubjectRecord*> by_id;
  for (const auto& r : rhc.cohort.records) by_id[r.id] = &r;
  for (const auto& id : rhc.split->low_ids) CHECK(by_id.at(id)->cohort == CohortLabel::hc);
}

TEST_CASE("run_pipeline: config validation") {
  PipelineConfig none;
  CHECK(code_of([&] { run_pipeline(none); }) == errc::invalid_params);

  PipelineConfig both = synthetic_config(1);
  both.input = "also.csv";
  CHECK(code_of([&] { run_pipeline(both); }) == errc::invalid_params);

  PipelineConfig low_k = synthetic_config(1);
  low_k.k = 1;
  CHECK(code_of([&] { run_pipeline(low_k); }) == errc::invalid_params);

  PipelineConfig bad_range = synthetic_config(1);
  bad_range.cutoff_lo = 50;
  bad_range.cutoff_hi = 20;
  CHECK(code_of([&] { run_pipeline(bad_range); }) == errc::invalid_params);
}

TEST_CASE("run_pipeline: missing input file fails with stage context") {
  PipelineConfig config;
  config.input = "/nonexistent/cohort.csv";
  try {
    run_pipeline(config);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::io_error);
    CHECK(std::string(e.what()).find("stage 'ingest'") != std::string::npos);
  }
}

TEST_CASE("run_pipeline: silhouette sweep is informational") {
  PipelineConfig config = synthetic_config(13);
  config.silhouette_sweep = {{2, 5}};
  PipelineReport report = run_pipeline(config);
  CHECK(report.silhouette_sweep.size() == 4);
  for (const auto& [k, s] : report.silhouette_sweep) {
    CHECK(k >= 2);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
  }
  // k unchanged by the sweep
  CHECK(report.run_for(Algorithm::hierarchical)->assignment.k == 3);
}

TEST_CASE("emit_report: manifest, determinism, and file inventory") {
  PipelineReport report = run_pipeline(synthetic_config(7));
  const auto d1 = temp_dir("csikit_emit1");
  const auto d2 = temp_dir("csikit_emit2");
  auto m1 = emit_report(report, d1);
  PipelineReport again = run_pipeline(synthetic_config(7));
  auto m2 = emit_report(again, d2);

  CHECK(m1.size() >= 7);
  CHECK(m1 == m2);
  for (const auto& e : m1) {
    CHECK(slurp(d1 / e.name) == slurp(d2 / e.name));
    CHECK(std::filesystem::file_size(d1 / e.name) == e.bytes);
  }
  CHECK(std::filesystem::exists(d1 / "manifest.json"));
  for (const char* name :
       {"report.json", "table2.csv", "table5_overall.csv", "table5_females.csv",
        "table5_males.csv", "dendrogram.json", "dendrogram.nwk", "assignments.csv",
        "boxplot_data.csv"})
    CHECK(std::filesystem::exists(d1 / name));

  // report.json parses and echoes the seed
  auto j = nlohmann::json::parse(slurp(d1 / "report.json"));
  CHECK(j["seed"] == 7);
  CHECK(j["version"] == std::string(kVersion));
}

TEST_CASE("emit_report: unwritable directory raises IoError") {
  PipelineReport report = run_pipeline(synthetic_config(2));
  CHECK(code_of([&] { emit_report(report, "/dev/null/sub"); }) == errc::io_error);
}

TEST_CASE("generate_fixture: table5_confusion round-trips through ingest") {
  const auto dir = temp_dir("csikit_fixture_t5");
  auto files = generate_fixture(FixtureKind::table5_confusion, 0, dir);
  REQUIRE(files.size() == 2);

  IngestResult res = ingest_csv(dir / "cohort.csv");
  CHECK(res.cohort.size() == 151);

  auto split_json = nlohmann::json::parse(slurp(dir / "split.json"));
  GroupSplit split;
  split.low_ids = split_json["low_ids"].get<std::vector<std::string>>();
  split.high_ids = split_json["high_ids"].get<std::vector<std::string>>();
  auto table = diagnostic_table(split, res.cohort, 35, 35);
  CHECK(table[0].tp == 29);
  CHECK(table[0].fn == 9);
  CHECK(table[0].tn == 86);
  CHECK(table[0].fp == 27);
}

TEST_CASE("generate_fixture: table3_profile reproducible for a fixed seed") {
  const auto d1 = temp_dir("csikit_fixture_a");
  const auto d2 = temp_dir("csikit_fixture_b");
  generate_fixture(FixtureKind::table3_profile, 9, d1);
  generate_fixture(FixtureKind::table3_profile, 9, d2);
  CHECK(slurp(d1 / "cohort.csv") == slurp(d2 / "cohort.csv"));
  CHECK(slurp(d1 / "true_labels.csv") == slurp(d2 / "true_labels.csv"));

  IngestResult res = ingest_csv(d1 / "cohort.csv");
  CHECK(res.cohort.size() == 151);
}
