#include "csikit/errors.hpp"

namespace csikit {

const char* errc_name(errc code) {
  switch (code) {
    case errc::missing_column: return "MissingColumn";
    case errc::parse_error: return "ParseError";
    case errc::range_violation: return "RangeViolation";
    case errc::empty_cohort: return "EmptyCohort";
    case errc::invalid_profile: return "InvalidProfile";
    case errc::constant_column: return "ConstantColumn";
    case errc::too_few_rows: return "TooFewRows";
    case errc::non_finite_input: return "NonFiniteInput";
    case errc::decomposition_failure: return "DecompositionFailure";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::k_out_of_range: return "KOutOfRange";
    case errc::degenerate_input: return "DegenerateInput";
    case errc::empty_input: return "EmptyInput";
    case errc::invalid_params: return "InvalidParams";
    case errc::single_cluster: return "SingleCluster";
    case errc::coincident_centroids: return "CoincidentCentroids";
    case errc::degenerate_dispersion: return "DegenerateDispersion";
    case errc::empty_report_list: return "EmptyReportList";
    case errc::not_three_clusters: return "NotThreeClusters";
    case errc::ambiguous_clusters: return "AmbiguousClusters";
    case errc::empty_group: return "EmptyGroup";
    case errc::empty_table: return "EmptyTable";
    case errc::empty_sample: return "EmptySample";
    case errc::unknown_variable: return "UnknownVariable";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

Error::Error(errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void raise(errc code, const std::string& message) { throw Error(code, message); }

}  // namespace csikit
