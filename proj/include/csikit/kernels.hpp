#pragma once

#include <span>
#include <vector>

#include "csikit/matrix.hpp"

namespace csikit::kernels {

// Data-parallel primitives shared by the clustering algorithms and validity
// indices. The parallel variants write disjoint output slots and run final
// reductions serially in row order, so their results are bitwise identical
// to the serial reference implementations in kernels::serial (asserted by
// the test suite and compared by the benchmark target).

/// Full symmetric N x N matrix of squared Euclidean distances.
Matrix pairwise_sq_dist(const Matrix& points);

/// labels[i] = index of the nearest center (squared Euclidean distance,
/// lowest index wins ties). labels.size() must equal points.rows.
void assign_nearest(const Matrix& points, const Matrix& centers, std::span<int> labels);

/// Mean of the member rows of each cluster 0..k-1; clusters without members
/// keep the corresponding `fallback` row.
Matrix cluster_means(const Matrix& points, std::span<const int> labels, std::size_t k,
                     const Matrix& fallback);

/// Sum of squared distances from each row to its assigned center.
double inertia(const Matrix& points, const Matrix& centers, std::span<const int> labels);

/// Per-row silhouette values s(i) for labels in 0..k-1 (no noise rows).
/// Singleton-cluster rows get s(i) = 0.
std::vector<double> silhouette_samples(const Matrix& points, std::span<const int> labels,
                                       std::size_t k);

namespace serial {
Matrix pairwise_sq_dist(const Matrix& points);
void assign_nearest(const Matrix& points, const Matrix& centers, std::span<int> labels);
Matrix cluster_means(const Matrix& points, std::span<const int> labels, std::size_t k,
                     const Matrix& fallback);
double inertia(const Matrix& points, const Matrix& centers, std::span<const int> labels);
std::vector<double> silhouette_samples(const Matrix& points, std::span<const int> labels,
                                       std::size_t k);
}  // namespace serial

}  // namespace csikit::kernels
