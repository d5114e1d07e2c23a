#pragma once

#include <stdexcept>
#include <string>

namespace csikit {

enum class errc {
  // dataset
  missing_column,
  parse_error,
  range_violation,
  empty_cohort,
  invalid_profile,
  // preprocess
  constant_column,
  too_few_rows,
  non_finite_input,
  decomposition_failure,
  dimension_mismatch,
  // clustering
  k_out_of_range,
  degenerate_input,
  empty_input,
  invalid_params,
  // validity
  single_cluster,
  coincident_centroids,
  degenerate_dispersion,
  empty_report_list,
  // diagnostics
  not_three_clusters,
  ambiguous_clusters,
  empty_group,
  empty_table,
  empty_sample,
  unknown_variable,
  // io
  io_error,
};

const char* errc_name(errc code);

/// Single exception type for the whole library; the code tells callers
/// which contract was violated.
class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& message);
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] void raise(errc code, const std::string& message);

}  // namespace csikit
