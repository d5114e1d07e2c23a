#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csikit/dataset.hpp"
#include "csikit/diagnostics.hpp"
#include "csikit/preprocess.hpp"
#include "csikit/validity.hpp"

namespace csikit {

inline constexpr const char* kVersion = "0.1.0";

struct SyntheticSpec {
  std::string profile = "table3";
  std::vector<std::size_t> sizes;  // empty = profile defaults
};

struct PipelineConfig {
  std::optional<std::filesystem::path> input;
  std::optional<SyntheticSpec> synthetic;
  VasScale vas_scale = VasScale::zero_to_ten;
  SdConvention sd_convention = SdConvention::population;

  std::uint64_t seed = 0;
  std::size_t k = 3;
  double variance_threshold = 0.80;
  std::vector<Algorithm> algorithms = {Algorithm::kmeans, Algorithm::hierarchical, Algorithm::som,
                                       Algorithm::dbscan};
  KmeansOptions kmeans_opts;
  SomOptions som_opts;
  DbscanParams dbscan_params;

  int cutoff_lo = 20;
  int cutoff_hi = 45;
  SplitMode mode = SplitMode::ab_vs_c;
  std::vector<Subgroup> subgroups = {Subgroup::overall, Subgroup::females, Subgroup::males};

  // Informational per-K mean-silhouette sweep (hierarchical); never
  // overrides k.
  std::optional<std::pair<std::size_t, std::size_t>> silhouette_sweep;

  nlohmann::json to_json() const;
};

struct AlgorithmRun {
  ClusterAssignment assignment;
  std::optional<Dendrogram> dendrogram;  // hierarchical only
  std::optional<SomGrid> som_grid;       // som only
};

/// Everything the pipeline produced; fully determined by (input bytes,
/// config), so re-running yields identical output.
struct PipelineReport {
  std::string version = kVersion;
  std::uint64_t seed = 0;
  nlohmann::json config_echo;

  Cohort cohort;
  std::size_t excluded_rows = 0;

  StandardizationParams standardization;
  PcaModel pca;
  std::vector<std::pair<std::string, double>> feature_importance;

  std::vector<AlgorithmRun> runs;
  std::vector<ValidityReport> validity;
  Algorithm chosen = Algorithm::hierarchical;

  std::optional<GroupSplit> split;
  std::string split_skip_reason;  // set when split/cutoff stages were skipped

  DemographicSummary cohort_by_label;   // HC vs CLBP
  DemographicSummary cohort_by_gender;  // F vs M
  std::optional<DemographicSummary> cluster_demographics;  // clusters A/B/C
  std::optional<DemographicSummary> split_demographics;    // low vs high

  std::vector<CutoffResult> cutoffs;
  std::vector<std::pair<Subgroup, std::string>> cutoff_skips;

  std::vector<std::pair<std::size_t, double>> silhouette_sweep;

  const AlgorithmRun* run_for(Algorithm a) const;
  const CutoffResult* cutoff_for(Subgroup s) const;
  nlohmann::json to_json() const;
};

/// Runs the full pipeline: ingest/generate, encode, standardize, PCA,
/// cluster with every configured algorithm, validate, pick the best, build
/// the low/high split, and sweep cutoffs per subgroup. Errors carry the
/// failing stage in their message.
PipelineReport run_pipeline(const PipelineConfig& config);

struct ManifestEntry {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string fnv1a64;  // hex

  bool operator==(const ManifestEntry&) const = default;
};

/// Writes report.json plus the CSV/dendrogram exports and a checksum
/// manifest into `dir`; returns the manifest (excluding manifest.json
/// itself).
std::vector<ManifestEntry> emit_report(const PipelineReport& report,
                                       const std::filesystem::path& dir);

enum class FixtureKind { table3_profile, table5_confusion };

/// table3_profile: synthetic cohort CSV (+ true labels) from the built-in
/// profile. table5_confusion: minimal cohort + split realizing the
/// reference confusion counts (tp=29, fn=9, tn=86, fp=27 at cutoff 35).
std::vector<std::filesystem::path> generate_fixture(FixtureKind kind, std::uint64_t seed,
                                                    const std::filesystem::path& dir);

/// In-memory builders behind the table5_confusion fixture; exposed for the
/// test suites.
Cohort table5_confusion_cohort();
GroupSplit table5_confusion_split();

/// Filters both sides of a split to one gender.
GroupSplit filter_split_by_gender(const GroupSplit& split, const Cohort& cohort, Gender gender);

}  // namespace csikit
