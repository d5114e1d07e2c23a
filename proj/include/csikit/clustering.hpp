#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "csikit/matrix.hpp"

namespace csikit {

enum class Algorithm { kmeans, hierarchical, som, dbscan };
const char* algorithm_name(Algorithm a);

/// Per-row cluster labels plus algorithm metadata. Non-noise labels are
/// contiguous 0..k-1; -1 marks DBSCAN noise.
struct ClusterAssignment {
  Algorithm algorithm = Algorithm::kmeans;
  std::vector<int> labels;
  int k = 0;  // cluster count excluding noise
  std::optional<std::uint64_t> seed;
  std::map<std::string, double> params;    // parameter echo
  std::optional<double> inertia;           // k-means objective of the winning restart
  std::vector<double> inertia_trace;       // per-iteration inertia of the winning restart

  std::size_t n_noise() const;
  std::vector<std::size_t> cluster_sizes() const;
};

/// Remaps labels so clusters are numbered 0..k-1 by descending size (ties by
/// previous label); empty clusters vanish. Noise stays -1. Returns new k.
int relabel_by_size(std::vector<int>& labels, int k);

/// Agglomerative merge tree. Leaves are 0..N-1; merge i creates node N+i.
struct Merge {
  int left = 0;
  int right = 0;
  double distance = 0.0;
  int size = 0;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;  // exactly leaves-1 entries, distances non-decreasing

  /// Flat clusters after undoing the last k-1 merges; labels 0..k-1 ordered
  /// by each cluster's lowest row index.
  std::vector<int> cut(std::size_t k) const;

  nlohmann::json to_json(std::span<const std::string> leaf_ids) const;
  std::string to_newick(std::span<const std::string> leaf_ids) const;
};

// ---- algorithms ----------------------------------------------------------

struct KmeansOptions {
  std::size_t restarts = 32;
  std::size_t max_iter = 300;
};

/// Lloyd iterations from k distinct sampled rows; best of `restarts` by
/// (inertia, restart index); final labels ordered by descending cluster size.
ClusterAssignment kmeans(const FeatureMatrix& matrix, std::size_t k, std::uint64_t seed,
                         const KmeansOptions& opts = {});

struct HierarchicalResult {
  ClusterAssignment assignment;
  Dendrogram dendrogram;
};

/// Bottom-up agglomeration with the Ward-form Lance-Williams update applied
/// to squared Euclidean distances; recorded merge heights are the square
/// roots. Ties on the minimum break by the smallest (id, id) pair.
HierarchicalResult hierarchical(const FeatureMatrix& matrix, std::size_t k);

struct SomOptions {
  std::size_t epochs = 200;
  double lr_start = 0.5;
  double lr_end = 0.01;
  double sigma_end = 0.5;
  double displacement_tol = 1e-4;  // stop when no node moves more than this in an epoch
};

struct SomGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  Matrix codebook;  // (width*height) x D, node (y, x) at row y*width + x
};

struct SomResult {
  ClusterAssignment assignment;
  SomGrid grid;
  std::size_t epochs_run = 0;
};

/// Side length of the square SOM grid: ceil(sqrt(5 * sqrt(n))).
std::size_t som_grid_side(std::size_t n);

/// Online SOM training with a Gaussian neighborhood and linear decay of
/// (learning rate, neighborhood width); rows are labeled by clustering the
/// trained codebook with k-means under the same seed.
SomResult som(const FeatureMatrix& matrix, std::size_t k, std::uint64_t seed,
              const SomOptions& opts = {});

struct DbscanParams {
  double eps = 15.0;
  std::size_t min_pts = 15;
};

/// Density clustering with strict comparisons: neighbors satisfy
/// dist < eps (point itself excluded) and core points satisfy
/// |neighborhood| > min_pts. Clusters are expanded from core points in
/// ascending row order; unreachable rows are noise (-1).
ClusterAssignment dbscan(const FeatureMatrix& matrix, const DbscanParams& params = {});

}  // namespace csikit
