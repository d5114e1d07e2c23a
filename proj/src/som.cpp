#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "csikit/clustering.hpp"
#include "csikit/errors.hpp"
#include "csikit/kernels.hpp"
#include "csikit/rng.hpp"

namespace csikit {

std::size_t som_grid_side(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::sqrt(5.0 * std::sqrt(static_cast<double>(n)))));
}

SomResult som(const FeatureMatrix& matrix, std::size_t k, std::uint64_t seed,
              const SomOptions& opts) {
  const std::size_t n = matrix.n_rows();
  const std::size_t dim = matrix.n_cols();
  if (n < 1) raise(errc::empty_input, "empty matrix");
  if (k < 1) raise(errc::k_out_of_range, "k must be >= 1");
  if (opts.epochs < 1) raise(errc::invalid_params, "epochs must be >= 1");

  const std::size_t side = som_grid_side(n);
  const std::size_t nodes = side * side;

  // Observed per-feature range for weight initialization.
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], matrix.values(i, d));
      hi[d] = std::max(hi[d], matrix.values(i, d));
    }

  Rng rng = Rng(seed).derive("som");
  Matrix codebook(nodes, dim);
  for (std::size_t v = 0; v < nodes; ++v)
    for (std::size_t d = 0; d < dim; ++d)
      codebook(v, d) = lo[d] + rng.uniform01() * (hi[d] - lo[d]);

  const double sigma_start = static_cast<double>(side) / 2.0;  // max(X, Y) / 2 on a square grid
  std::size_t epochs_run = 0;
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    const double t = opts.epochs > 1
                         ? static_cast<double>(epoch) / static_cast<double>(opts.epochs - 1)
                         : 0.0;
    const double lr = opts.lr_start + (opts.lr_end - opts.lr_start) * t;
    const double sigma = sigma_start + (opts.sigma_end - sigma_start) * t;
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);

    double max_disp2 = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t i = rng.uniform_index(n);
      auto x = matrix.values.row(i);

      // Best-matching unit; lowest node index wins ties.
      std::size_t bmu = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v < nodes; ++v) {
        const double d = sq_dist(x, codebook.row(v));
        if (d < best) {
          best = d;
          bmu = v;
        }
      }
      const double by = static_cast<double>(bmu / side);
      const double bx = static_cast<double>(bmu % side);

      for (std::size_t v = 0; v < nodes; ++v) {
        const double dy = static_cast<double>(v / side) - by;
        const double dx = static_cast<double>(v % side) - bx;
        const double g = std::exp(-(dy * dy + dx * dx) * inv_two_sigma2);
        const double eta_g = lr * g;
        auto w = codebook.row(v);
        double disp2 = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double delta = eta_g * (x[d] - w[d]);
          w[d] += delta;
          disp2 += delta * delta;
        }
        max_disp2 = std::max(max_disp2, disp2);
      }
    }
    epochs_run = epoch + 1;
    if (max_disp2 < opts.displacement_tol * opts.displacement_tol) break;
  }

  // Map each row to its BMU.
  std::vector<int> bmu_of_row(n);
  kernels::assign_nearest(matrix.values, codebook, bmu_of_row);
  std::set<int> occupied(bmu_of_row.begin(), bmu_of_row.end());
  if (k > occupied.size())
    raise(errc::k_out_of_range,
          "k exceeds occupied nodes (" + std::to_string(occupied.size()) + ")");

  // Cluster the codebook with k-means under the same seed and label each
  // row by its BMU's cluster.
  FeatureMatrix cb;
  cb.values = codebook;
  cb.column_names = matrix.column_names;
  cb.row_ids.reserve(nodes);
  for (std::size_t v = 0; v < nodes; ++v) cb.row_ids.push_back("node" + std::to_string(v));
  ClusterAssignment node_clusters = kmeans(cb, k, seed);

  ClusterAssignment out;
  out.algorithm = Algorithm::som;
  out.seed = seed;
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.labels[i] = node_clusters.labels[static_cast<std::size_t>(bmu_of_row[i])];
  out.k = relabel_by_size(out.labels, static_cast<int>(k));
  out.params["grid_side"] = static_cast<double>(side);
  out.params["epochs"] = static_cast<double>(opts.epochs);
  out.params["epochs_run"] = static_cast<double>(epochs_run);
  out.params["lr_start"] = opts.lr_start;
  out.params["lr_end"] = opts.lr_end;
  out.params["sigma_start"] = sigma_start;
  out.params["sigma_end"] = opts.sigma_end;
  out.params["requested_k"] = static_cast<double>(k);

  SomResult res;
  res.assignment = std::move(out);
  res.grid = SomGrid{side, side, std::move(codebook)};
  res.epochs_run = epochs_run;
  return res;
}

}  // namespace csikit
