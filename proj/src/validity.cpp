#include "csikit/validity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csikit/errors.hpp"
#include "csikit/kernels.hpp"

namespace csikit {
namespace {

/// Rows with a non-noise label, compacted for the index kernels.
struct Evaluated {
  Matrix points;
  std::vector<int> labels;
  std::size_t k = 0;
};

Evaluated evaluated_rows(const FeatureMatrix& matrix, const ClusterAssignment& assignment) {
  Evaluated ev;
  ev.k = static_cast<std::size_t>(assignment.k);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < assignment.labels.size(); ++i)
    if (assignment.labels[i] >= 0) keep.push_back(i);
  ev.points = Matrix(keep.size(), matrix.n_cols());
  ev.labels.reserve(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    auto src = matrix.values.row(keep[r]);
    std::copy(src.begin(), src.end(), ev.points.row(r).begin());
    ev.labels.push_back(assignment.labels[keep[r]]);
  }
  return ev;
}

Matrix centroids_of(const Evaluated& ev) {
  Matrix zero(ev.k, ev.points.cols, 0.0);
  return kernels::cluster_means(ev.points, ev.labels, ev.k, zero);
}

}  // namespace

double silhouette(const FeatureMatrix& matrix, const ClusterAssignment& assignment) {
  Evaluated ev = evaluated_rows(matrix, assignment);
  if (ev.k < 2) raise(errc::single_cluster, "silhouette needs at least 2 clusters");
  const auto s = kernels::silhouette_samples(ev.points, ev.labels, ev.k);
  double total = 0.0;
  for (double v : s) total += v;
  return total / static_cast<double>(s.size());
}

double davies_bouldin(const FeatureMatrix& matrix, const ClusterAssignment& assignment) {
  Evaluated ev = evaluated_rows(matrix, assignment);
  if (ev.k < 2) raise(errc::single_cluster, "Davies-Bouldin needs at least 2 clusters");
  const Matrix centers = centroids_of(ev);

  std::vector<double> scatter(ev.k, 0.0);
  std::vector<std::size_t> counts(ev.k, 0);
  for (std::size_t i = 0; i < ev.points.rows; ++i) {
    const std::size_t c = static_cast<std::size_t>(ev.labels[i]);
    scatter[c] += dist(ev.points.row(i), centers.row(c));
    ++counts[c];
  }
  for (std::size_t c = 0; c < ev.k; ++c) scatter[c] /= static_cast<double>(counts[c]);

  double total = 0.0;
  for (std::size_t i = 0; i < ev.k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < ev.k; ++j) {
      if (j == i) continue;
      const double m = dist(centers.row(i), centers.row(j));
      if (!(m > 0.0)) raise(errc::coincident_centroids, "two cluster centroids coincide");
      worst = std::max(worst, (scatter[i] + scatter[j]) / m);
    }
    total += worst;
  }
  return total / static_cast<double>(ev.k);
}

double calinski_harabasz(const FeatureMatrix& matrix, const ClusterAssignment& assignment) {
  Evaluated ev = evaluated_rows(matrix, assignment);
  const std::size_t n = ev.points.rows;
  if (ev.k < 2 || n < 3 || ev.k > n - 1) raise(errc::k_out_of_range, "need 2 <= k <= N-1");
  const Matrix centers = centroids_of(ev);

  std::vector<double> global(ev.points.cols, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = ev.points.row(i);
    for (std::size_t d = 0; d < ev.points.cols; ++d) global[d] += r[d];
  }
  for (double& g : global) g /= static_cast<double>(n);

  std::vector<std::size_t> counts(ev.k, 0);
  for (int l : ev.labels) ++counts[static_cast<std::size_t>(l)];

  double between = 0.0;
  for (std::size_t c = 0; c < ev.k; ++c)
    between += static_cast<double>(counts[c]) * sq_dist(centers.row(c), global);
  const double co = between / static_cast<double>(ev.k - 1);

  double within = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    within += sq_dist(ev.points.row(i), centers.row(static_cast<std::size_t>(ev.labels[i])));
  const double se = within / static_cast<double>(n - ev.k);
  if (!(se > 0.0)) raise(errc::degenerate_dispersion, "zero within-cluster dispersion");
  return co / se;
}

ExternalValidity external_validity(const ClusterAssignment& assignment, const Cohort& cohort) {
  const std::size_t k = static_cast<std::size_t>(std::max(assignment.k, 0));
  if (k == 0) return {};
  std::vector<std::size_t> hc(k, 0), size(k, 0);
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    const int l = assignment.labels[i];
    if (l < 0) continue;
    ++size[static_cast<std::size_t>(l)];
    if (cohort.records[i].cohort == CohortLabel::hc) ++hc[static_cast<std::size_t>(l)];
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < k; ++c) {
    if (hc[c] > hc[best]) {
      best = c;
      continue;
    }
    if (hc[c] == hc[best]) {
      // larger HC fraction first, then lower label (c > best keeps best)
      const double fc = size[c] ? static_cast<double>(hc[c]) / static_cast<double>(size[c]) : 0.0;
      const double fb = size[best] ? static_cast<double>(hc[best]) / static_cast<double>(size[best]) : 0.0;
      if (fc > fb) best = c;
    }
  }
  return {hc[best], size[best]};
}

ValidityReport evaluate_clustering(const FeatureMatrix& matrix, const ClusterAssignment& assignment,
                                   const Cohort& cohort) {
  ValidityReport report;
  report.algorithm = assignment.algorithm;
  report.n_evaluated = assignment.labels.size() - assignment.n_noise();
  auto tryindex = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  report.silhouette = tryindex([&] { return silhouette(matrix, assignment); });
  report.davies_bouldin = tryindex([&] { return davies_bouldin(matrix, assignment); });
  report.calinski_harabasz = tryindex([&] { return calinski_harabasz(matrix, assignment); });
  report.external = external_validity(assignment, cohort);
  return report;
}

Algorithm select_best(std::span<const ValidityReport> reports) {
  if (reports.empty()) raise(errc::empty_report_list, "no reports to rank");

  auto balance = [](const ValidityReport& r) {
    return 2 * static_cast<long long>(r.external.true_hc) -
           static_cast<long long>(r.external.hc_cluster_size);
  };
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const double pos_inf = std::numeric_limits<double>::infinity();

  std::size_t best = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const auto& a = reports[i];
    const auto& b = reports[best];
    const auto ba = balance(a), bb = balance(b);
    if (ba != bb) {
      if (ba > bb) best = i;
      continue;
    }
    const double sa = a.silhouette.value_or(neg_inf), sb = b.silhouette.value_or(neg_inf);
    if (sa != sb) {
      if (sa > sb) best = i;
      continue;
    }
    const double ca = a.calinski_harabasz.value_or(neg_inf), cb = b.calinski_harabasz.value_or(neg_inf);
    if (ca != cb) {
      if (ca > cb) best = i;
      continue;
    }
    const double da = a.davies_bouldin.value_or(pos_inf), db = b.davies_bouldin.value_or(pos_inf);
    if (da < db) best = i;
  }
  return reports[best].algorithm;
}

}  // namespace csikit
