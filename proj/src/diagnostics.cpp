#include "csikit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "csikit/errors.hpp"

namespace csikit {

const char* to_string(SplitMode m) { return m == SplitMode::ab_vs_c ? "ab-vs-c" : "hc-vs-c"; }
const char* to_string(Subgroup s) {
  switch (s) {
    case Subgroup::overall: return "overall";
    case Subgroup::females: return "females";
    case Subgroup::males: return "males";
  }
  return "unknown";
}

GroupSplit build_split(const ClusterAssignment& assignment, const Cohort& cohort, SplitMode mode) {
  if (assignment.k != 3) raise(errc::not_three_clusters, "split needs exactly 3 clusters");

  double mean_csi[3] = {0, 0, 0};
  double hc_frac[3] = {0, 0, 0};
  std::size_t size[3] = {0, 0, 0};
  std::size_t hc[3] = {0, 0, 0};
  for (std::size_t i = 0; i < cohort.records.size(); ++i) {
    const int l = assignment.labels[i];
    if (l < 0) continue;
    ++size[l];
    mean_csi[l] += cohort.records[i].csi;
    if (cohort.records[i].cohort == CohortLabel::hc) ++hc[l];
  }
  for (int c = 0; c < 3; ++c) {
    if (size[c] == 0) raise(errc::not_three_clusters, "cluster " + std::to_string(c) + " is empty");
    mean_csi[c] /= static_cast<double>(size[c]);
    hc_frac[c] = static_cast<double>(hc[c]) / static_cast<double>(size[c]);
  }

  int c_high = 0;
  for (int c = 1; c < 3; ++c)
    if (mean_csi[c] > mean_csi[c_high]) c_high = c;
  for (int c = 0; c < 3; ++c)
    if (c != c_high && mean_csi[c] == mean_csi[c_high])
      raise(errc::ambiguous_clusters, "tie on mean CSI");

  int c_a = -1;
  for (int c = 0; c < 3; ++c) {
    if (c == c_high) continue;
    if (c_a < 0 || hc_frac[c] > hc_frac[c_a]) c_a = c;
  }
  for (int c = 0; c < 3; ++c)
    if (c != c_high && c != c_a && hc_frac[c] == hc_frac[c_a])
      raise(errc::ambiguous_clusters, "tie on HC fraction");
  int c_b = 3 - c_high - c_a;

  GroupSplit split;
  split.mode = mode;
  split.cluster_a = c_a;
  split.cluster_b = c_b;
  split.cluster_c = c_high;
  for (std::size_t i = 0; i < cohort.records.size(); ++i) {
    const int l = assignment.labels[i];
    const auto& r = cohort.records[i];
    if (l == c_high) {
      split.high_ids.push_back(r.id);
    } else if (mode == SplitMode::ab_vs_c) {
      if (l == c_a || l == c_b) split.low_ids.push_back(r.id);
    } else {
      if (l == c_a && r.cohort == CohortLabel::hc) split.low_ids.push_back(r.id);
    }
  }
  return split;
}

namespace {

std::vector<double> csi_of(const std::vector<std::string>& ids, const Cohort& cohort,
                           const std::map<std::string, std::size_t>& index) {
  std::vector<double> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(cohort.records[index.at(id)].csi);
  return out;
}

std::map<std::string, std::size_t> id_index(const Cohort& cohort) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < cohort.records.size(); ++i) index[cohort.records[i].id] = i;
  return index;
}

DiagnosticRow make_row(int cutoff, std::span<const double> high, std::span<const double> low) {
  DiagnosticRow row;
  row.cutoff = cutoff;
  for (double v : high) (v >= cutoff ? row.tp : row.fn)++;
  for (double v : low) (v >= cutoff ? row.fp : row.tn)++;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  row.sensitivity = static_cast<double>(row.tp) / static_cast<double>(row.tp + row.fn);
  row.specificity = static_cast<double>(row.tn) / static_cast<double>(row.tn + row.fp);
  row.auc = (row.sensitivity + row.specificity) / 2.0;
  row.youden = row.sensitivity + row.specificity - 1.0;
  row.ppv = row.tp + row.fp > 0 ? static_cast<double>(row.tp) / static_cast<double>(row.tp + row.fp) : nan;
  row.npv = row.tn + row.fn > 0 ? static_cast<double>(row.tn) / static_cast<double>(row.tn + row.fn) : nan;
  // Zero numerator wins over zero denominator: a test that misses nothing
  // has NLR 0 even when specificity is 0, and vice versa for PLR.
  const double fpr = 1.0 - row.specificity;
  row.plr = row.sensitivity == 0.0 ? 0.0 : (fpr > 0.0 ? row.sensitivity / fpr : inf);
  row.nlr = row.sensitivity == 1.0 ? 0.0
                                   : (row.specificity > 0.0 ? (1.0 - row.sensitivity) / row.specificity
                                                            : inf);
  return row;
}

}  // namespace

std::vector<DiagnosticRow> diagnostic_table(const GroupSplit& split, const Cohort& cohort,
                                            int cutoff_lo, int cutoff_hi) {
  if (split.low_ids.empty() || split.high_ids.empty())
    raise(errc::empty_group, "both groups must be non-empty");
  if (cutoff_lo > cutoff_hi) raise(errc::invalid_params, "empty cutoff range");

  const auto index = id_index(cohort);
  const auto high = csi_of(split.high_ids, cohort, index);
  const auto low = csi_of(split.low_ids, cohort, index);

  std::vector<DiagnosticRow> table;
  table.reserve(static_cast<std::size_t>(cutoff_hi - cutoff_lo + 1));
  for (int c = cutoff_lo; c <= cutoff_hi; ++c) table.push_back(make_row(c, high, low));
  return table;
}

CutoffResult select_cutoff(std::vector<DiagnosticRow> table) {
  if (table.empty()) raise(errc::empty_table, "empty diagnostic table");

  std::size_t best = 0;
  auto balance = [](const DiagnosticRow& r) { return std::abs(r.sensitivity - r.specificity); };
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& a = table[i];
    const auto& b = table[best];
    if (a.youden > b.youden ||
        (a.youden == b.youden &&
         (balance(a) < balance(b) || (balance(a) == balance(b) && a.cutoff < b.cutoff))))
      best = i;
  }

  CutoffResult result;
  result.optimal = table[best];
  result.optimal_cutoff = table[best].cutoff;
  result.clinically_useful = table[best].sensitivity + table[best].specificity >= 1.5;
  result.table = std::move(table);
  return result;
}

double roc_auc_trapezoid(const GroupSplit& split, const Cohort& cohort) {
  const auto index = id_index(cohort);
  const auto high = csi_of(split.high_ids, cohort, index);
  const auto low = csi_of(split.low_ids, cohort, index);
  // Rank form of the trapezoidal area: P(high > low) + P(high == low)/2.
  double score = 0.0;
  for (double h : high)
    for (double l : low) score += h > l ? 1.0 : (h == l ? 0.5 : 0.0);
  return score / (static_cast<double>(high.size()) * static_cast<double>(low.size()));
}

namespace {

/// Midranks of the pooled sample; sum of ranks of the first n1 entries
/// gives the rank-sum statistic.
std::vector<double> midranks(std::vector<double>& pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && pooled[order[j]] == pooled[order[i]]) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = mid;
    i = j;
  }
  return ranks;
}

/// Exact two-sided p via the permutation distribution of the rank sum:
/// dynamic program over doubled midranks (integers), counting choices of n1
/// pooled positions. Identical to full subset enumeration.
double exact_two_sided_p(const std::vector<double>& ranks, std::size_t n1, double u_obs) {
  const std::size_t n = ranks.size();
  std::vector<long long> dr(n);
  long long total_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    dr[i] = std::llround(2.0 * ranks[i]);
    total_sum += dr[i];
  }
  // ways[c][s] = number of c-subsets with doubled-rank sum s
  std::vector<std::vector<unsigned long long>> ways(
      n1 + 1, std::vector<unsigned long long>(static_cast<std::size_t>(total_sum) + 1, 0));
  ways[0][0] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cap = std::min(n1, i + 1);
    for (std::size_t c = cap; c >= 1; --c) {
      const auto& prev = ways[c - 1];
      auto& cur = ways[c];
      for (long long s = total_sum - dr[i]; s >= 0; --s)
        if (prev[static_cast<std::size_t>(s)])
          cur[static_cast<std::size_t>(s + dr[i])] += prev[static_cast<std::size_t>(s)];
    }
  }

  const std::size_t n2 = n - n1;
  const double n1n2 = static_cast<double>(n1) * static_cast<double>(n2);
  const double u_star = std::min(u_obs, n1n2 - u_obs);
  // U <= u*  <=>  doubled rank sum s <= 2*u* + n1(n1+1)
  const long long t_le = std::llround(2.0 * u_star) + static_cast<long long>(n1 * (n1 + 1));
  // U >= n1n2 - u*  <=>  s >= 2*(n1n2 - u*) + n1(n1+1)
  const long long t_ge = std::llround(2.0 * (n1n2 - u_star)) + static_cast<long long>(n1 * (n1 + 1));

  unsigned long long count_le = 0, count_ge = 0, total = 0;
  for (long long s = 0; s <= total_sum; ++s) {
    const unsigned long long w = ways[n1][static_cast<std::size_t>(s)];
    total += w;
    if (s <= t_le) count_le += w;
    if (s >= t_ge) count_ge += w;
  }
  const double p = static_cast<double>(count_le + count_ge) / static_cast<double>(total);
  return std::min(1.0, p);
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) raise(errc::empty_sample, "both samples must be non-empty");

  const std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;
  std::vector<double> pooled;
  pooled.reserve(n);
  pooled.insert(pooled.end(), a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);

  double r1 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
  const double u = r1 - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;

  MannWhitneyResult res;
  res.u = u;
  res.n1 = n1;
  res.n2 = n2;

  if (n1 * n2 <= 400) {
    res.exact = true;
    res.p_value = exact_two_sided_p(ranks, n1, u);
    return res;
  }

  // Normal approximation with tie correction and continuity correction.
  std::map<double, std::size_t> tie_counts;
  for (double v : pooled) ++tie_counts[v];
  double tie_term = 0.0;
  for (const auto& [v, t] : tie_counts)
    tie_term += static_cast<double>(t) * static_cast<double>(t) * static_cast<double>(t) -
                static_cast<double>(t);
  const double n1n2 = static_cast<double>(n1) * static_cast<double>(n2);
  const double nn = static_cast<double>(n);
  const double var =
      n1n2 / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (!(var > 0.0)) {
    res.p_value = 1.0;
    return res;
  }
  const double mean = n1n2 / 2.0;
  const double z = std::max(0.0, std::abs(u - mean) - 0.5) / std::sqrt(var);
  // keep p strictly positive even when erfc underflows
  res.p_value = std::min(1.0, std::max(std::erfc(z / std::sqrt(2.0)),
                                       std::numeric_limits<double>::min()));
  return res;
}

DemographicSummary demographic_summary(
    std::span<const std::pair<std::string, const Cohort*>> groups,
    std::span<const std::string> variables) {
  if (groups.empty()) raise(errc::empty_group, "no groups");
  for (const auto& v : variables)
    if (!is_known_variable(v)) raise(errc::unknown_variable, "unknown variable '" + v + "'");

  DemographicSummary summary;
  for (const auto& [name, cohort] : groups) {
    summary.group_names.push_back(name);
    std::size_t f = 0, m = 0;
    for (const auto& r : cohort->records) (r.gender == Gender::female ? f : m)++;
    summary.gender_counts.push_back(std::to_string(f) + "F/" + std::to_string(m) + "M");
  }
  for (std::size_t i = 0; i < groups.size(); ++i)
    for (std::size_t j = i + 1; j < groups.size(); ++j) summary.pairs.emplace_back(i, j);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& var : variables) {
    SummaryRow row;
    row.variable = var;
    std::vector<std::vector<double>> values(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (const auto& r : groups[g].second->records)
        if (auto v = variable_value(r, var)) values[g].push_back(*v);
      SummaryCell cell;
      cell.n = values[g].size();
      if (cell.n > 0) {
        cell.mean = std::accumulate(values[g].begin(), values[g].end(), 0.0) /
                    static_cast<double>(cell.n);
        if (cell.n > 1) {
          double ss = 0.0;
          for (double v : values[g]) ss += (v - cell.mean) * (v - cell.mean);
          cell.sd = std::sqrt(ss / static_cast<double>(cell.n - 1));
        } else {
          cell.sd = nan;
        }
      } else {
        cell.mean = nan;
        cell.sd = nan;
      }
      row.cells.push_back(cell);
    }
    for (const auto& [i, j] : summary.pairs) {
      if (values[i].empty() || values[j].empty()) {
        row.p_values.push_back(nan);
      } else {
        row.p_values.push_back(mann_whitney_u(values[i], values[j]).p_value);
      }
    }
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

}  // namespace csikit
