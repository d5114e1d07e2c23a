#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace csikit {

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool operator==(const Matrix&) const = default;
};

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double dist(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(sq_dist(a, b));
}

/// Numeric matrix with stable row identity; the unit every pipeline stage
/// consumes and produces.
struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> column_names;
  std::vector<std::string> row_ids;

  std::size_t n_rows() const { return values.rows; }
  std::size_t n_cols() const { return values.cols; }

  bool operator==(const FeatureMatrix&) const = default;
};

}  // namespace csikit
