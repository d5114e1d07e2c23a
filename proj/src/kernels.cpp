#include "csikit/kernels.hpp"

#include <limits>

namespace csikit::kernels {

Matrix pairwise_sq_dist(const Matrix& points) {
  const std::size_t n = points.rows;
  Matrix d(n, n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    for (std::size_t j = 0; j < n; ++j)
      d(static_cast<std::size_t>(i), j) = sq_dist(points.row(static_cast<std::size_t>(i)), points.row(j));
  }
  return d;
}

void assign_nearest(const Matrix& points, const Matrix& centers, std::span<int> labels) {
  const std::size_t n = points.rows;
  const std::size_t k = centers.rows;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double d = sq_dist(points.row(i), centers.row(c));
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    labels[i] = best_c;
  }
}

Matrix cluster_means(const Matrix& points, std::span<const int> labels, std::size_t k,
                     const Matrix& fallback) {
  Matrix means(k, points.cols, 0.0);
  // Parallel over clusters: each cluster sums its members in ascending row
  // order, matching the serial reference addition order exactly.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t cc = 0; cc < static_cast<std::ptrdiff_t>(k); ++cc) {
    const std::size_t c = static_cast<std::size_t>(cc);
    std::size_t count = 0;
    auto m = means.row(c);
    for (std::size_t i = 0; i < points.rows; ++i) {
      if (labels[i] != static_cast<int>(c)) continue;
      ++count;
      auto p = points.row(i);
      for (std::size_t d = 0; d < points.cols; ++d) m[d] += p[d];
    }
    if (count == 0) {
      auto f = fallback.row(c);
      for (std::size_t d = 0; d < points.cols; ++d) m[d] = f[d];
    } else {
      for (std::size_t d = 0; d < points.cols; ++d) m[d] /= static_cast<double>(count);
    }
  }
  return means;
}

double inertia(const Matrix& points, const Matrix& centers, std::span<const int> labels) {
  const std::size_t n = points.rows;
  std::vector<double> contrib(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    contrib[static_cast<std::size_t>(i)] =
        sq_dist(points.row(static_cast<std::size_t>(i)),
                centers.row(static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])));
  double total = 0.0;
  for (double c : contrib) total += c;  // fixed-order reduction
  return total;
}

std::vector<double> silhouette_samples(const Matrix& points, std::span<const int> labels,
                                       std::size_t k) {
  const std::size_t n = points.rows;
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(labels[i])];

  std::vector<double> s(n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const std::size_t own = static_cast<std::size_t>(labels[i]);
    if (counts[own] <= 1) {
      s[i] = 0.0;
      continue;
    }
    std::vector<double> sums(k, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      sums[static_cast<std::size_t>(labels[j])] += dist(points.row(i), points.row(j));
    const double a = sums[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own || counts[c] == 0) continue;
      b = std::min(b, sums[c] / static_cast<double>(counts[c]));
    }
    const double m = std::max(a, b);
    s[i] = m > 0.0 ? (b - a) / m : 0.0;
  }
  return s;
}

namespace serial {

Matrix pairwise_sq_dist(const Matrix& points) {
  const std::size_t n = points.rows;
  Matrix d(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d(i, j) = sq_dist(points.row(i), points.row(j));
  return d;
}

void assign_nearest(const Matrix& points, const Matrix& centers, std::span<int> labels) {
  for (std::size_t i = 0; i < points.rows; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (std::size_t c = 0; c < centers.rows; ++c) {
      const double d = sq_dist(points.row(i), centers.row(c));
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    labels[i] = best_c;
  }
}

Matrix cluster_means(const Matrix& points, std::span<const int> labels, std::size_t k,
                     const Matrix& fallback) {
  Matrix means(k, points.cols, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.rows; ++i) {
    const std::size_t c = static_cast<std::size_t>(labels[i]);
    ++counts[c];
    auto p = points.row(i);
    auto m = means.row(c);
    for (std::size_t d = 0; d < points.cols; ++d) m[d] += p[d];
  }
  for (std::size_t c = 0; c < k; ++c) {
    auto m = means.row(c);
    if (counts[c] == 0) {
      auto f = fallback.row(c);
      for (std::size_t d = 0; d < points.cols; ++d) m[d] = f[d];
    } else {
      for (std::size_t d = 0; d < points.cols; ++d) m[d] /= static_cast<double>(counts[c]);
    }
  }
  return means;
}

double inertia(const Matrix& points, const Matrix& centers, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.rows; ++i)
    total += sq_dist(points.row(i), centers.row(static_cast<std::size_t>(labels[i])));
  return total;
}

std::vector<double> silhouette_samples(const Matrix& points, std::span<const int> labels,
                                       std::size_t k) {
  const std::size_t n = points.rows;
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(labels[i])];

  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = static_cast<std::size_t>(labels[i]);
    if (counts[own] <= 1) {
      s[i] = 0.0;
      continue;
    }
    std::vector<double> sums(k, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      sums[static_cast<std::size_t>(labels[j])] += dist(points.row(i), points.row(j));
    const double a = sums[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own || counts[c] == 0) continue;
      b = std::min(b, sums[c] / static_cast<double>(counts[c]));
    }
    const double m = std::max(a, b);
    s[i] = m > 0.0 ? (b - a) / m : 0.0;
  }
  return s;
}

}  // namespace serial
}  // namespace csikit::kernels
