#include <deque>

#include "csikit/clustering.hpp"
#include "csikit/errors.hpp"
#include "csikit/kernels.hpp"

namespace csikit {

ClusterAssignment dbscan(const FeatureMatrix& matrix, const DbscanParams& params) {
  if (!(params.eps > 0.0) || params.min_pts < 1)
    raise(errc::invalid_params, "eps must be > 0 and min_pts >= 1");

  const std::size_t n = matrix.n_rows();
  const double eps2 = params.eps * params.eps;

  // Neighborhoods exclude the point itself; membership is strict (< eps),
  // and so is the core test (> min_pts).
  std::vector<std::vector<int>> neighbors(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (sq_dist(matrix.values.row(i), matrix.values.row(j)) < eps2)
        neighbors[i].push_back(static_cast<int>(j));
    }
  }

  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) core[i] = neighbors[i].size() > params.min_pts;

  constexpr int kUnset = -2;
  std::vector<int> labels(n, kUnset);
  int next_cluster = 0;

  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || labels[i] != kUnset) continue;
    const int cluster = next_cluster++;
    labels[i] = cluster;
    std::deque<int> queue(neighbors[i].begin(), neighbors[i].end());
    while (!queue.empty()) {
      const int q = queue.front();
      queue.pop_front();
      const std::size_t qi = static_cast<std::size_t>(q);
      if (labels[qi] != kUnset) continue;
      labels[qi] = cluster;
      if (core[qi])
        for (int nb : neighbors[qi])
          if (labels[static_cast<std::size_t>(nb)] == kUnset) queue.push_back(nb);
    }
  }

  for (int& l : labels)
    if (l == kUnset) l = -1;

  ClusterAssignment out;
  out.algorithm = Algorithm::dbscan;
  out.labels = std::move(labels);
  out.k = next_cluster;
  out.params["eps"] = params.eps;
  out.params["min_pts"] = static_cast<double>(params.min_pts);
  return out;
}

}  // namespace csikit
