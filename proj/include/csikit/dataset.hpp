#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csikit/types.hpp"

namespace csikit {

/// Maps canonical column names (id, cohort, gender, vas, ...) to the header
/// names actually present in the file. Header matching is case-insensitive.
struct CsvSchema {
  std::map<std::string, std::string> columns;

  /// Header name for a canonical column (identity unless remapped).
  std::string resolve(const std::string& canonical) const;
};

/// VAS may arrive on the 0-100 mm scale; it is normalized to 0-10 on ingest.
enum class VasScale { zero_to_ten, millimeters };

struct IngestOptions {
  CsvSchema schema;
  VasScale vas_scale = VasScale::zero_to_ten;
};

struct IngestResult {
  Cohort cohort;
  std::size_t excluded_rows = 0;  // rows dropped for missing required values
};

/// Reads and validates a cohort CSV. Rows with any missing clustering
/// feature are dropped and counted, mirroring the exclusion of incomplete
/// questionnaires; malformed or out-of-range values are hard errors.
IngestResult ingest_csv(const std::filesystem::path& path, const IngestOptions& opts = {});

/// Writes a cohort in the canonical CSV layout. Numeric values use
/// shortest-round-trip formatting so ingest(write(c)) == c.
void write_csv(const Cohort& cohort, const std::filesystem::path& path);

/// Per-cluster summary statistics used to drive the synthetic generator.
struct ClusterStats {
  std::string name;
  std::size_t size = 0;
  std::size_t females = 0;
  std::size_t hc_members = 0;
  // variable name -> (mean, sd); must cover all eight questionnaires,
  // demographics optional.
  std::map<std::string, std::pair<double, double>> variables;
};

struct ClusterStatProfile {
  std::vector<ClusterStats> clusters;

  std::vector<std::size_t> sizes() const;
};

/// Built-in three-cluster reference profile (the "table3" synthetic source):
/// cluster sizes 65/48/38 with per-variable means and SDs.
const ClusterStatProfile& table3_profile();

struct SyntheticOptions {
  bool clamp = true;  // clamp draws into each field's valid range
};

/// Draws each subject's variables independently per cluster from normal
/// distributions with the profile's mean/SD. Gender and cohort label are
/// drawn from the cluster's proportions. Deterministic for a fixed seed;
/// generating cluster indices are retained as true_labels.
Cohort generate_synthetic(const ClusterStatProfile& profile,
                          std::span<const std::size_t> n_per_cluster, std::uint64_t seed,
                          const SyntheticOptions& opts = {});

/// Filtered copy preserving ids, order, and true labels.
Cohort subgroup(const Cohort& cohort, const std::function<bool(const SubjectRecord&)>& keep);

std::function<bool(const SubjectRecord&)> by_gender(Gender g);
std::function<bool(const SubjectRecord&)> by_cohort(CohortLabel c);

}  // namespace csikit
