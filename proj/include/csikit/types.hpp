#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace csikit {

enum class CohortLabel { hc, clbp };
enum class Gender { female, male };

const char* to_string(CohortLabel c);
const char* to_string(Gender g);

/// One participant: cohort label, gender, optional demographics, and the
/// eight questionnaire scores used for clustering.
struct SubjectRecord {
  std::string id;
  CohortLabel cohort = CohortLabel::hc;
  Gender gender = Gender::female;

  std::optional<double> age;     // years
  std::optional<double> height;  // cm
  std::optional<double> weight;  // kg
  std::optional<double> bmi;     // kg/m^2

  double vas = 0.0;        // pain, 0-10
  double pdi = 0.0;        // 0-70
  double was = 0.0;        // 0-10
  double rand36_pf = 0.0;  // 0-100
  double pcs = 0.0;        // 0-52
  double ieq = 0.0;        // 0-48
  double bsi = 0.0;        // t-score, unbounded
  double csi = 0.0;        // 0-100

  bool operator==(const SubjectRecord&) const = default;
};

enum class Provenance { ingested, synthetic };

/// Ordered list of subjects. Row order is stable across the whole pipeline:
/// row i always refers to the same subject. Immutable after construction.
struct Cohort {
  std::vector<SubjectRecord> records;
  Provenance provenance = Provenance::ingested;
  std::optional<std::uint64_t> seed;  // synthetic only
  std::vector<int> true_labels;       // synthetic only; generating cluster per row

  std::size_t size() const { return records.size(); }
  bool operator==(const Cohort&) const = default;
};

/// Metadata for one questionnaire field: record member, valid range, and
/// whether synthetic draws are clamped into that range.
struct FieldSpec {
  const char* name;
  double SubjectRecord::*member;
  double min;
  double max;
  bool clamp;
};

/// The eight questionnaire fields in canonical order (vas..csi).
const std::vector<FieldSpec>& questionnaire_fields();

/// Optional demographic fields (age, height, weight, bmi).
struct OptionalFieldSpec {
  const char* name;
  std::optional<double> SubjectRecord::*member;
};
const std::vector<OptionalFieldSpec>& demographic_fields();

/// Fetch any numeric variable by name (demographics may be absent).
std::optional<double> variable_value(const SubjectRecord& r, const std::string& name);
bool is_known_variable(const std::string& name);

}  // namespace csikit
