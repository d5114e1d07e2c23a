#include <algorithm>
#include <numeric>

#include "csikit/clustering.hpp"
#include "csikit/errors.hpp"
#include "csikit/kernels.hpp"
#include "csikit/rng.hpp"

namespace csikit {
namespace {

bool rows_equal(const Matrix& m, std::size_t a, std::size_t b) {
  for (std::size_t c = 0; c < m.cols; ++c)
    if (m(a, c) != m(b, c)) return false;
  return true;
}

std::size_t count_distinct_rows(const Matrix& m) {
  std::vector<std::size_t> idx(m.rows);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(m.row(a).begin(), m.row(a).end(), m.row(b).begin(),
                                        m.row(b).end());
  });
  std::size_t distinct = m.rows == 0 ? 0 : 1;
  for (std::size_t i = 1; i < m.rows; ++i)
    if (!rows_equal(m, idx[i - 1], idx[i])) ++distinct;
  return distinct;
}

struct RestartResult {
  std::vector<int> labels;
  double inertia = 0.0;
  std::vector<double> trace;
};

RestartResult run_restart(const Matrix& points, std::size_t k, Rng rng, std::size_t max_iter) {
  const std::size_t n = points.rows;

  // Sample k rows with pairwise-distinct values as the initial centroids.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  Matrix centers(k, points.cols);
  std::vector<std::size_t> picked;
  for (std::size_t i : order) {
    bool dup = false;
    for (std::size_t p : picked)
      if (rows_equal(points, p, i)) dup = true;
    if (dup) continue;
    auto dst = centers.row(picked.size());
    auto src = points.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
    picked.push_back(i);
    if (picked.size() == k) break;
  }

  RestartResult res;
  res.labels.assign(n, -1);
  std::vector<int> prev(n, -1);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    kernels::assign_nearest(points, centers, res.labels);
    if (res.labels == prev) break;  // no assignment changed
    prev = res.labels;
    centers = kernels::cluster_means(points, res.labels, k, centers);
    res.trace.push_back(kernels::inertia(points, centers, res.labels));
  }
  res.inertia = res.trace.empty() ? kernels::inertia(points, centers, res.labels) : res.trace.back();
  return res;
}

}  // namespace

ClusterAssignment kmeans(const FeatureMatrix& matrix, std::size_t k, std::uint64_t seed,
                         const KmeansOptions& opts) {
  const std::size_t n = matrix.n_rows();
  if (k < 1 || k > n) raise(errc::k_out_of_range, "k must be in [1, N]");
  if (opts.restarts < 1 || opts.max_iter < 1) raise(errc::invalid_params, "restarts and max_iter must be >= 1");
  if (count_distinct_rows(matrix.values) < k)
    raise(errc::degenerate_input, "fewer than k distinct rows");

  const Rng master = Rng(seed).derive("kmeans");
  std::vector<RestartResult> results(opts.restarts);

  // Restarts are independent; the best-of reduction below is by
  // (inertia, restart index), so the outcome is schedule-independent.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(opts.restarts); ++r)
    results[static_cast<std::size_t>(r)] =
        run_restart(matrix.values, k, master.derive(static_cast<std::uint64_t>(r)), opts.max_iter);

  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].inertia < results[best].inertia) best = r;

  ClusterAssignment out;
  out.algorithm = Algorithm::kmeans;
  out.seed = seed;
  out.labels = std::move(results[best].labels);
  out.k = relabel_by_size(out.labels, static_cast<int>(k));
  out.inertia = results[best].inertia;
  out.inertia_trace = std::move(results[best].trace);
  out.params["requested_k"] = static_cast<double>(k);
  out.params["restarts"] = static_cast<double>(opts.restarts);
  out.params["max_iter"] = static_cast<double>(opts.max_iter);
  out.params["best_restart"] = static_cast<double>(best);
  return out;
}

}  // namespace csikit
