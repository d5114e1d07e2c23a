#pragma once

#include <optional>
#include <span>

#include "csikit/clustering.hpp"
#include "csikit/matrix.hpp"
#include "csikit/types.hpp"

namespace csikit {

struct ExternalValidity {
  std::size_t true_hc = 0;          // HC subjects inside the HC-dominant cluster
  std::size_t hc_cluster_size = 0;  // that cluster's total size
};

/// Internal indices plus the HC-recovery check for one clustering. Indices
/// are absent when undefined for the assignment (e.g. a single cluster).
struct ValidityReport {
  Algorithm algorithm = Algorithm::kmeans;
  std::optional<double> silhouette;
  std::optional<double> davies_bouldin;
  std::optional<double> calinski_harabasz;
  ExternalValidity external;
  std::size_t n_evaluated = 0;  // rows scored by internal indices (noise excluded)
};

/// Mean silhouette over non-noise rows (Euclidean distance, s = 0 for
/// singleton clusters). Requires k >= 2.
double silhouette(const FeatureMatrix& matrix, const ClusterAssignment& assignment);

/// Mean over clusters of the worst (S_I + S_J) / M_IJ ratio, with S the mean
/// member-to-centroid distance and M the centroid distance. Lower is better.
double davies_bouldin(const FeatureMatrix& matrix, const ClusterAssignment& assignment);

/// Between-cluster dispersion over within-cluster dispersion (squared
/// Euclidean distances), normalized by (k-1) and (n-k). Higher is better.
double calinski_harabasz(const FeatureMatrix& matrix, const ClusterAssignment& assignment);

/// The cluster holding the most HC subjects (ties: larger HC fraction, then
/// lower label); returns the HC count inside it and its size. Noise rows
/// belong to no cluster.
ExternalValidity external_validity(const ClusterAssignment& assignment, const Cohort& cohort);

/// All indices with errors mapped to absent values.
ValidityReport evaluate_clustering(const FeatureMatrix& matrix, const ClusterAssignment& assignment,
                                   const Cohort& cohort);

/// Ranks by external balance (true HC captured minus contaminating non-HC),
/// then silhouette, then Calinski-Harabasz, then lowest Davies-Bouldin, then
/// input order.
Algorithm select_best(std::span<const ValidityReport> reports);

}  // namespace csikit
