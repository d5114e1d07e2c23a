#include "csikit/types.hpp"

namespace csikit {

const char* to_string(CohortLabel c) { return c == CohortLabel::hc ? "HC" : "CLBP"; }
const char* to_string(Gender g) { return g == Gender::female ? "F" : "M"; }

const std::vector<FieldSpec>& questionnaire_fields() {
  static const double inf = std::numeric_limits<double>::infinity();
  static const std::vector<FieldSpec> fields = {
      {"vas", &SubjectRecord::vas, 0.0, 10.0, true},
      {"pdi", &SubjectRecord::pdi, 0.0, 70.0, true},
      {"was", &SubjectRecord::was, 0.0, 10.0, true},
      {"rand36_pf", &SubjectRecord::rand36_pf, 0.0, 100.0, true},
      {"pcs", &SubjectRecord::pcs, 0.0, 52.0, true},
      {"ieq", &SubjectRecord::ieq, 0.0, 48.0, true},
      {"bsi", &SubjectRecord::bsi, -inf, inf, false},
      {"csi", &SubjectRecord::csi, 0.0, 100.0, true},
  };
  return fields;
}

const std::vector<OptionalFieldSpec>& demographic_fields() {
  static const std::vector<OptionalFieldSpec> fields = {
      {"age", &SubjectRecord::age},
      {"height", &SubjectRecord::height},
      {"weight", &SubjectRecord::weight},
      {"bmi", &SubjectRecord::bmi},
  };
  return fields;
}

std::optional<double> variable_value(const SubjectRecord& r, const std::string& name) {
  for (const auto& f : questionnaire_fields())
    if (name == f.name) return r.*f.member;
  for (const auto& f : demographic_fields())
    if (name == f.name) return r.*f.member;
  return std::nullopt;
}

bool is_known_variable(const std::string& name) {
  for (const auto& f : questionnaire_fields())
    if (name == f.name) return true;
  for (const auto& f : demographic_fields())
    if (name == f.name) return true;
  return false;
}

}  // namespace csikit
