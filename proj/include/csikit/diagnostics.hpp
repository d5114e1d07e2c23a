#pragma once

#include <span>
#include <string>
#include <vector>

#include "csikit/clustering.hpp"
#include "csikit/types.hpp"

namespace csikit {

enum class SplitMode { ab_vs_c, hc_vs_c };
const char* to_string(SplitMode m);

/// Low/high screening groups derived from a three-cluster assignment.
/// Cluster C is the one with the highest mean CSI; cluster A the one with
/// the highest HC fraction; B the remainder.
struct GroupSplit {
  std::vector<std::string> low_ids;
  std::vector<std::string> high_ids;
  SplitMode mode = SplitMode::ab_vs_c;
  int cluster_a = -1;
  int cluster_b = -1;
  int cluster_c = -1;
};

GroupSplit build_split(const ClusterAssignment& assignment, const Cohort& cohort, SplitMode mode);

/// Confusion counts and derived metrics for one candidate threshold.
/// A subject is test-positive iff csi >= cutoff; the high-HACS group is
/// condition-positive. PPV/NPV are NaN when undefined (0/0); PLR/NLR are 0
/// when their numerator vanishes and +inf when only the denominator does.
/// auc here is the balanced accuracy (sensitivity + specificity) / 2 of the
/// single threshold.
struct DiagnosticRow {
  int cutoff = 0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double auc = 0.0;
  double youden = 0.0;
  double ppv = 0.0;
  double npv = 0.0;
  double plr = 0.0;
  double nlr = 0.0;
};

std::vector<DiagnosticRow> diagnostic_table(const GroupSplit& split, const Cohort& cohort,
                                            int cutoff_lo = 20, int cutoff_hi = 45);

enum class Subgroup { overall, females, males };
const char* to_string(Subgroup s);

struct CutoffResult {
  Subgroup subgroup = Subgroup::overall;
  int optimal_cutoff = 0;
  DiagnosticRow optimal;
  bool clinically_useful = false;  // sensitivity + specificity >= 1.5
  std::vector<DiagnosticRow> table;
  double roc_auc = 0.0;  // whole-curve trapezoidal AUC, distinct from per-row auc
};

/// Maximizes Youden; ties break by minimal |sensitivity - specificity|,
/// then by the lower cutoff. Invariant under table reordering.
CutoffResult select_cutoff(std::vector<DiagnosticRow> table);

/// Rank-based AUC of CSI for high vs low (equals the trapezoidal area under
/// the full empirical ROC, ties counted half).
double roc_auc_trapezoid(const GroupSplit& split, const Cohort& cohort);

struct MannWhitneyResult {
  double u = 0.0;  // U statistic of the first sample (midranks on ties)
  double p_value = 1.0;
  std::size_t n1 = 0, n2 = 0;
  bool exact = false;  // exact permutation distribution (n1*n2 <= 400)
};

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Mean +/- SD per group per variable, with pairwise Mann-Whitney p-values.
struct SummaryCell {
  double mean = 0.0;
  double sd = 0.0;  // sample SD; NaN when n < 2
  std::size_t n = 0;
};

struct SummaryRow {
  std::string variable;
  std::vector<SummaryCell> cells;   // one per group
  std::vector<double> p_values;     // one per group pair; NaN when not computable
};

struct DemographicSummary {
  std::vector<std::string> group_names;
  std::vector<std::string> gender_counts;             // "25F/40M" style, one per group
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // group index pairs with p-values
  std::vector<SummaryRow> rows;
};

DemographicSummary demographic_summary(
    std::span<const std::pair<std::string, const Cohort*>> groups,
    std::span<const std::string> variables);

}  // namespace csikit
