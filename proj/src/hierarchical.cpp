#include <limits>
#include <numeric>

#include "csikit/clustering.hpp"
#include "csikit/errors.hpp"
#include "csikit/kernels.hpp"

namespace csikit {

HierarchicalResult hierarchical(const FeatureMatrix& matrix, std::size_t k) {
  const std::size_t n = matrix.n_rows();
  if (n < 2) raise(errc::too_few_rows, "need at least 2 rows");
  if (k < 1 || k > n) raise(errc::k_out_of_range, "k must be in [1, N]");

  // Working matrix of squared Euclidean cluster distances. With the
  // Ward-form coefficients the recurrence keeps every entry equal to
  // 2*|A||B|/(|A|+|B|) * ||centroid_A - centroid_B||^2; recorded merge
  // heights are square roots of these values.
  Matrix d2 = kernels::pairwise_sq_dist(matrix.values);

  std::vector<bool> alive(n, true);
  std::vector<int> id(n);        // creation id occupying each slot
  std::vector<double> size(n, 1.0);
  std::iota(id.begin(), id.end(), 0);
  int next_id = static_cast<int>(n);

  Dendrogram dendro;
  dendro.leaves = n;
  dendro.merges.reserve(n - 1);

  std::vector<double> row_min(n);
  std::vector<int> row_arg(n);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    // Row minima in parallel, then a fixed-order reduction. Ties break by
    // the lexicographically smallest creation-id pair, a total order, so
    // the winner does not depend on scan order.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
      const std::size_t i = static_cast<std::size_t>(ii);
      row_min[i] = std::numeric_limits<double>::infinity();
      row_arg[i] = -1;
      if (!alive[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !alive[j]) continue;
        const double d = d2(i, j);
        if (d < row_min[i]) {
          row_min[i] = d;
          row_arg[i] = static_cast<int>(j);
        } else if (d == row_min[i] && row_arg[i] >= 0) {
          const int a0 = std::min(id[i], id[static_cast<std::size_t>(row_arg[i])]);
          const int b0 = std::max(id[i], id[static_cast<std::size_t>(row_arg[i])]);
          const int a1 = std::min(id[i], id[j]);
          const int b1 = std::max(id[i], id[j]);
          if (a1 < a0 || (a1 == a0 && b1 < b0)) row_arg[i] = static_cast<int>(j);
        }
      }
    }

    std::size_t bi = n, bj = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i] || row_arg[i] < 0) continue;
      const std::size_t j = static_cast<std::size_t>(row_arg[i]);
      const int a1 = std::min(id[i], id[j]);
      const int b1 = std::max(id[i], id[j]);
      bool better = false;
      if (row_min[i] < best) {
        better = true;
      } else if (row_min[i] == best && bi < n) {
        const int a0 = std::min(id[bi], id[bj]);
        const int b0 = std::max(id[bi], id[bj]);
        better = a1 < a0 || (a1 == a0 && b1 < b0);
      }
      if (better) {
        best = row_min[i];
        bi = i;
        bj = j;
      }
    }

    const double ni = size[bi], nj = size[bj];
    dendro.merges.push_back({std::min(id[bi], id[bj]), std::max(id[bi], id[bj]),
                             std::sqrt(best), static_cast<int>(ni + nj)});

    // Lance-Williams update into slot bi; slot bj dies.
    // alpha_i = (n_i + n_k) / (n_i + n_j + n_k), beta = -n_k / (...), gamma = 0.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(n); ++kk) {
      const std::size_t s = static_cast<std::size_t>(kk);
      if (!alive[s] || s == bi || s == bj) continue;
      const double nk = size[s];
      const double denom = ni + nj + nk;
      const double v = ((ni + nk) / denom) * d2(bi, s) + ((nj + nk) / denom) * d2(bj, s) -
                       (nk / denom) * d2(bi, bj);
      d2(bi, s) = v;
      d2(s, bi) = v;
    }

    alive[bj] = false;
    size[bi] = ni + nj;
    id[bi] = next_id++;
  }

  ClusterAssignment assignment;
  assignment.algorithm = Algorithm::hierarchical;
  assignment.labels = dendro.cut(k);
  assignment.k = static_cast<int>(k);
  assignment.params["requested_k"] = static_cast<double>(k);
  return {std::move(assignment), std::move(dendro)};
}

}  // namespace csikit
