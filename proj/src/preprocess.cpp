#include "csikit/preprocess.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "csikit/errors.hpp"

namespace csikit {

FeatureMatrix encode_features(const Cohort& cohort) {
  if (cohort.records.empty()) raise(errc::empty_cohort, "cannot encode an empty cohort");

  FeatureMatrix fm;
  fm.column_names = {"gender"};
  for (const auto& f : questionnaire_fields()) fm.column_names.emplace_back(f.name);

  const std::size_t n = cohort.records.size();
  const std::size_t d = fm.column_names.size();
  fm.values = Matrix(n, d);
  fm.row_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = cohort.records[i];
    fm.row_ids.push_back(r.id);
    fm.values(i, 0) = r.gender == Gender::female ? 1.0 : 0.0;
    std::size_t c = 1;
    for (const auto& f : questionnaire_fields()) fm.values(i, c++) = r.*f.member;
  }
  return fm;
}

std::pair<StandardizationParams, FeatureMatrix> fit_standardize(const FeatureMatrix& matrix,
                                                                SdConvention convention) {
  const std::size_t n = matrix.n_rows();
  const std::size_t d = matrix.n_cols();
  if (n < 2) raise(errc::too_few_rows, "standardization needs at least 2 rows");
  if (!matrix.values.all_finite()) raise(errc::non_finite_input, "matrix has non-finite entries");

  StandardizationParams params;
  params.convention = convention;
  params.column_names = matrix.column_names;
  params.mean.resize(d);
  params.sd.resize(d);

  for (std::size_t c = 0; c < d; ++c) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += matrix.values(i, c);
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dv = matrix.values(i, c) - m;
      ss += dv * dv;
    }
    const double div = convention == SdConvention::population ? static_cast<double>(n)
                                                              : static_cast<double>(n - 1);
    const double sd = std::sqrt(ss / div);
    if (!(sd > 0.0))
      raise(errc::constant_column, "column '" + matrix.column_names[c] + "' is constant");
    params.mean[c] = m;
    params.sd[c] = sd;
  }
  return {params, apply_standardize(params, matrix)};
}

FeatureMatrix apply_standardize(const StandardizationParams& params, const FeatureMatrix& matrix) {
  if (matrix.n_cols() != params.mean.size())
    raise(errc::dimension_mismatch, "column count does not match standardization params");
  FeatureMatrix out = matrix;
  for (std::size_t i = 0; i < matrix.n_rows(); ++i)
    for (std::size_t c = 0; c < matrix.n_cols(); ++c)
      out.values(i, c) = (matrix.values(i, c) - params.mean[c]) / params.sd[c];
  return out;
}

PcaModel fit_pca(const FeatureMatrix& standardized, double variance_threshold) {
  const std::size_t n = standardized.n_rows();
  const std::size_t d = standardized.n_cols();
  if (n < 2) raise(errc::too_few_rows, "PCA needs at least 2 rows");
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0))
    raise(errc::invalid_params, "variance threshold must be in (0, 1]");
  if (!standardized.values.all_finite()) raise(errc::non_finite_input, "matrix has non-finite entries");

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> x(standardized.values.data.data(), static_cast<Eigen::Index>(n),
                               static_cast<Eigen::Index>(d));
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  // Population divisor: on population-z-scored input this is exactly the
  // correlation matrix (unit diagonal, trace D). With sample-z-scored input
  // the matrix is scaled by (n-1)/n; ratios, components, and the retention
  // rule are unaffected.
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) raise(errc::decomposition_failure, "eigensolver failed");

  PcaModel model;
  model.column_names = standardized.column_names;
  model.variance_threshold = variance_threshold;
  model.few_rows_warning = n <= d;

  // Eigen returns ascending order; reverse to descending.
  model.eigenvalues.resize(d);
  model.components = Matrix(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    const Eigen::Index src = static_cast<Eigen::Index>(d - 1 - c);
    model.eigenvalues[c] = std::max(0.0, solver.eigenvalues()(src));
    for (std::size_t r = 0; r < d; ++r) model.components(r, c) = solver.eigenvectors()(r, src);
  }

  // Deterministic sign: the largest-magnitude loading of each component is
  // positive (first index wins magnitude ties).
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < d; ++r) {
      const double a = std::abs(model.components(r, c));
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (model.components(arg, c) < 0.0)
      for (std::size_t r = 0; r < d; ++r) model.components(r, c) = -model.components(r, c);
  }

  const double total = std::accumulate(model.eigenvalues.begin(), model.eigenvalues.end(), 0.0);
  if (!(total > 0.0)) raise(errc::decomposition_failure, "zero total variance");
  model.explained_variance_ratio.resize(d);
  for (std::size_t c = 0; c < d; ++c) model.explained_variance_ratio[c] = model.eigenvalues[c] / total;

  model.retained = d;
  double cum = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    cum += model.eigenvalues[c];
    if (cum + 1e-12 * total >= variance_threshold * total) {
      model.retained = c + 1;
      break;
    }
  }
  return model;
}

FeatureMatrix transform(const PcaModel& model, const FeatureMatrix& matrix) {
  const std::size_t d = model.components.rows;
  if (matrix.n_cols() != d)
    raise(errc::dimension_mismatch, "matrix has " + std::to_string(matrix.n_cols()) +
                                        " columns, model expects " + std::to_string(d));
  const std::size_t m = model.retained;
  FeatureMatrix out;
  out.row_ids = matrix.row_ids;
  out.column_names.reserve(m);
  for (std::size_t c = 0; c < m; ++c) out.column_names.push_back("pc" + std::to_string(c + 1));
  out.values = Matrix(matrix.n_rows(), m);
  for (std::size_t i = 0; i < matrix.n_rows(); ++i)
    for (std::size_t c = 0; c < m; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += matrix.values(i, j) * model.components(j, c);
      out.values(i, c) = s;
    }
  return out;
}

std::vector<std::pair<std::string, double>> feature_importance(const PcaModel& model) {
  const std::size_t d = model.components.rows;
  std::vector<std::pair<std::string, double>> scores;
  scores.reserve(d);
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < model.retained; ++c)
      s += std::abs(model.components(r, c)) * model.explained_variance_ratio[c];
    scores.emplace_back(model.column_names[r], s);
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a].second > scores[b].second; });
  std::vector<std::pair<std::string, double>> out;
  out.reserve(d);
  for (std::size_t i : order) out.push_back(scores[i]);
  return out;
}

nlohmann::json PcaModel::to_json() const {
  nlohmann::json j;
  j["column_names"] = column_names;
  j["eigenvalues"] = eigenvalues;
  j["explained_variance_ratio"] = explained_variance_ratio;
  j["retained"] = retained;
  j["variance_threshold"] = variance_threshold;
  j["retention_rule"] = "smallest m with cumulative ratio >= threshold";
  j["few_rows_warning"] = few_rows_warning;
  std::vector<std::vector<double>> comps(components.rows, std::vector<double>(components.cols));
  for (std::size_t r = 0; r < components.rows; ++r)
    for (std::size_t c = 0; c < components.cols; ++c) comps[r][c] = components(r, c);
  j["components"] = comps;
  return j;
}

PcaModel PcaModel::from_json(const nlohmann::json& j) {
  PcaModel m;
  m.column_names = j.at("column_names").get<std::vector<std::string>>();
  m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  m.explained_variance_ratio = j.at("explained_variance_ratio").get<std::vector<double>>();
  m.retained = j.at("retained").get<std::size_t>();
  m.variance_threshold = j.at("variance_threshold").get<double>();
  m.few_rows_warning = j.value("few_rows_warning", false);
  const auto comps = j.at("components").get<std::vector<std::vector<double>>>();
  const std::size_t d = comps.size();
  m.components = Matrix(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) m.components(r, c) = comps[r][c];
  return m;
}

}  // namespace csikit
