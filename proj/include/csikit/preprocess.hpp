#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "csikit/matrix.hpp"
#include "csikit/types.hpp"

namespace csikit {

/// SD convention for z-scoring. Population (divide by N) is the default so
/// a two-point column maps exactly to [-1, 1]; the covariance divisor in
/// fit_pca follows the same convention, keeping the correlation diagonal
/// at exactly 1.
enum class SdConvention { population, sample };

struct StandardizationParams {
  std::vector<std::string> column_names;
  std::vector<double> mean;
  std::vector<double> sd;
  SdConvention convention = SdConvention::population;
};

/// Encodes the nine clustering features in fixed column order:
/// [gender (F=1, M=0), vas, pdi, was, rand36_pf, pcs, ieq, bsi, csi].
FeatureMatrix encode_features(const Cohort& cohort);

std::pair<StandardizationParams, FeatureMatrix> fit_standardize(
    const FeatureMatrix& matrix, SdConvention convention = SdConvention::population);

FeatureMatrix apply_standardize(const StandardizationParams& params, const FeatureMatrix& matrix);

struct PcaModel {
  std::vector<std::string> column_names;
  std::vector<double> eigenvalues;                // descending, nonnegative
  Matrix components;                              // D x D, columns = principal axes
  std::vector<double> explained_variance_ratio;   // sums to 1
  std::size_t retained = 0;                       // smallest m with cumulative ratio >= threshold
  double variance_threshold = 0.0;
  bool few_rows_warning = false;                  // set when N <= D

  nlohmann::json to_json() const;
  static PcaModel from_json(const nlohmann::json& j);
};

/// Eigendecomposition of the covariance matrix of an already-standardized
/// matrix. Eigenvalues are sorted descending; each component's
/// largest-magnitude loading is made positive so the model is
/// sign-deterministic.
PcaModel fit_pca(const FeatureMatrix& standardized, double variance_threshold);

/// Projects a standardized matrix onto the first `retained` components.
FeatureMatrix transform(const PcaModel& model, const FeatureMatrix& matrix);

/// Ranks input features by sum over retained components of
/// |loading| * explained_variance_ratio, descending; ties keep column order.
std::vector<std::pair<std::string, double>> feature_importance(const PcaModel& model);

}  // namespace csikit
