#include "csikit/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include "csikit/errors.hpp"
#include "csikit/rng.hpp"

namespace csikit {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const std::vector<std::string>& required_columns() {
  static const std::vector<std::string> cols = {"id",  "cohort", "gender",    "vas", "pdi", "was",
                                                "rand36_pf", "pcs", "ieq", "bsi", "csi"};
  return cols;
}

const std::vector<std::string>& optional_columns() {
  static const std::vector<std::string> cols = {"age", "height", "weight", "bmi"};
  return cols;
}

const std::vector<std::string>& canonical_order() {
  static const std::vector<std::string> cols = {"id",  "cohort", "gender", "age", "height",
                                                "weight", "bmi", "vas", "pdi", "was",
                                                "rand36_pf", "pcs", "ieq", "bsi", "csi"};
  return cols;
}

double parse_number(const std::string& raw, std::size_t row, const std::string& column) {
  const std::string s = trim(raw);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    raise(errc::parse_error, "row " + std::to_string(row) + ", column '" + column +
                                 "': cannot parse number from '" + s + "'");
  return v;
}

}  // namespace

std::string CsvSchema::resolve(const std::string& canonical) const {
  auto it = columns.find(canonical);
  return it == columns.end() ? canonical : it->second;
}

IngestResult ingest_csv(const std::filesystem::path& path, const IngestOptions& opts) {
  std::ifstream in(path);
  if (!in) raise(errc::io_error, "cannot open '" + path.string() + "'");

  std::string header_line;
  if (!std::getline(in, header_line)) raise(errc::empty_cohort, "file has no header");
  // strip UTF-8 BOM
  if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    header_line.erase(0, 3);

  const auto headers = split_csv_line(header_line);
  std::map<std::string, std::size_t> header_index;
  for (std::size_t i = 0; i < headers.size(); ++i) header_index[lower(trim(headers[i]))] = i;

  std::map<std::string, std::size_t> col;  // canonical -> column index
  for (const auto& name : required_columns()) {
    auto it = header_index.find(lower(opts.schema.resolve(name)));
    if (it == header_index.end())
      raise(errc::missing_column, "required column '" + name + "' not found");
    col[name] = it->second;
  }
  for (const auto& name : optional_columns()) {
    auto it = header_index.find(lower(opts.schema.resolve(name)));
    if (it != header_index.end()) col[name] = it->second;
  }

  IngestResult result;
  result.cohort.provenance = Provenance::ingested;
  std::map<std::string, std::size_t> seen_ids;

  std::string line;
  std::size_t row = 1;  // 1-based data row number
  for (; std::getline(in, line); ++row) {
    if (trim(line).empty()) {
      --row;
      continue;
    }
    auto fields = split_csv_line(line);
    auto cell = [&](const std::string& name) -> std::string {
      auto it = col.find(name);
      if (it == col.end() || it->second >= fields.size()) return "";
      return trim(fields[it->second]);
    };

    // A row missing any required value (the nine clustering features plus
    // id and cohort) is excluded and counted, not repaired.
    bool missing = false;
    for (const auto& name : required_columns())
      if (cell(name).empty()) missing = true;
    if (missing) {
      ++result.excluded_rows;
      continue;
    }

    SubjectRecord rec;
    rec.id = cell("id");
    if (seen_ids.count(rec.id))
      raise(errc::parse_error, "row " + std::to_string(row) + ": duplicate id '" + rec.id + "'");
    seen_ids[rec.id] = row;

    const std::string cohort_s = lower(cell("cohort"));
    if (cohort_s == "hc")
      rec.cohort = CohortLabel::hc;
    else if (cohort_s == "clbp")
      rec.cohort = CohortLabel::clbp;
    else
      raise(errc::parse_error,
            "row " + std::to_string(row) + ": cohort must be HC or CLBP, got '" + cell("cohort") + "'");

    const std::string gender_s = lower(cell("gender"));
    if (gender_s == "f")
      rec.gender = Gender::female;
    else if (gender_s == "m")
      rec.gender = Gender::male;
    else
      raise(errc::parse_error,
            "row " + std::to_string(row) + ": gender must be F or M, got '" + cell("gender") + "'");

    for (const auto& f : questionnaire_fields()) {
      double v = parse_number(cell(f.name), row, f.name);
      if (std::string(f.name) == "vas" && opts.vas_scale == VasScale::millimeters) v /= 10.0;
      if (v < f.min || v > f.max)
        raise(errc::range_violation, "row " + std::to_string(row) + ", field '" + f.name + "': " +
                                         format_double(v) + " outside [" + format_double(f.min) +
                                         ", " + format_double(f.max) + "]");
      rec.*f.member = v;
    }
    for (const auto& f : demographic_fields()) {
      const std::string raw = cell(f.name);
      if (!raw.empty()) rec.*f.member = parse_number(raw, row, f.name);
    }
    result.cohort.records.push_back(std::move(rec));
  }

  if (result.cohort.records.empty()) raise(errc::empty_cohort, "no usable rows in '" + path.string() + "'");
  return result;
}

void write_csv(const Cohort& cohort, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(errc::io_error, "cannot write '" + path.string() + "'");

  const auto& cols = canonical_order();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";

  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : cohort.records) {
    out << r.id << ',' << to_string(r.cohort) << ',' << to_string(r.gender) << ',' << opt(r.age)
        << ',' << opt(r.height) << ',' << opt(r.weight) << ',' << opt(r.bmi);
    for (const auto& f : questionnaire_fields()) out << ',' << format_double(r.*f.member);
    out << "\n";
  }
  if (!out) raise(errc::io_error, "failed writing '" + path.string() + "'");
}

std::vector<std::size_t> ClusterStatProfile::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back(c.size);
  return out;
}

const ClusterStatProfile& table3_profile() {
  static const ClusterStatProfile profile = [] {
    ClusterStatProfile p;
    auto mk = [](std::string name, std::size_t size, std::size_t females, std::size_t hc,
                 std::initializer_list<std::pair<const char*, std::pair<double, double>>> vars) {
      ClusterStats c;
      c.name = std::move(name);
      c.size = size;
      c.females = females;
      c.hc_members = hc;
      for (const auto& [k, v] : vars) c.variables[k] = v;
      return c;
    };
    p.clusters.push_back(mk("A", 65, 25, 62,
                            {{"age", {41.2, 13.6}},
                             {"height", {160.7, 55.8}},
                             {"weight", {84.5, 17.9}},
                             {"bmi", {26.3, 4.8}},
                             {"vas", {0.5, 0.9}},
                             {"pdi", {5.3, 7.2}},
                             {"was", {8.4, 1.4}},
                             {"rand36_pf", {28.7, 2.6}},
                             {"pcs", {4.5, 4.8}},
                             {"ieq", {3.5, 5.4}},
                             {"bsi", {32.4, 5.2}},
                             {"csi", {22.1, 9.5}}}));
    p.clusters.push_back(mk("B", 48, 24, 1,
                            {{"age", {39.4, 11.8}},
                             {"height", {175.5, 8.9}},
                             {"weight", {82.3, 13.1}},
                             {"bmi", {26.8, 4.1}},
                             {"vas", {3.3, 1.9}},
                             {"pdi", {22.9, 13.2}},
                             {"was", {6.0, 2.0}},
                             {"rand36_pf", {71.1, 14.4}},
                             {"pcs", {11.0, 8.1}},
                             {"ieq", {11.1, 6.4}},
                             {"bsi", {33.9, 9.6}},
                             {"csi", {35.0, 11.5}}}));
    p.clusters.push_back(mk("C", 38, 25, 0,
                            {{"age", {43.2, 12.3}},
                             {"height", {175.4, 11.6}},
                             {"weight", {90.5, 18.6}},
                             {"bmi", {29.5, 6.0}},
                             {"vas", {5.4, 2.4}},
                             {"pdi", {39.3, 10.1}},
                             {"was", {3.4, 2.0}},
                             {"rand36_pf", {38.4, 13.7}},
                             {"pcs", {21.5, 10.6}},
                             {"ieq", {18.3, 8.5}},
                             {"bsi", {40.5, 8.0}},
                             {"csi", {42.9, 12.2}}}));
    return p;
  }();
  return profile;
}

Cohort generate_synthetic(const ClusterStatProfile& profile,
                          std::span<const std::size_t> n_per_cluster, std::uint64_t seed,
                          const SyntheticOptions& opts) {
  if (profile.clusters.empty()) raise(errc::invalid_profile, "profile has no clusters");
  if (n_per_cluster.size() != profile.clusters.size())
    raise(errc::invalid_profile, "n_per_cluster size does not match cluster count");
  for (std::size_t c = 0; c < profile.clusters.size(); ++c) {
    const auto& cl = profile.clusters[c];
    if (n_per_cluster[c] < 1) raise(errc::invalid_profile, "cluster '" + cl.name + "' size < 1");
    if (cl.size < 1) raise(errc::invalid_profile, "cluster '" + cl.name + "' profile size < 1");
    if (cl.females > cl.size || cl.hc_members > cl.size)
      raise(errc::invalid_profile, "cluster '" + cl.name + "' counts exceed size");
    for (const auto& f : questionnaire_fields())
      if (!cl.variables.count(f.name))
        raise(errc::invalid_profile,
              "cluster '" + cl.name + "' missing variable '" + std::string(f.name) + "'");
    for (const auto& [name, ms] : cl.variables) {
      if (!is_known_variable(name))
        raise(errc::invalid_profile, "unknown variable '" + name + "'");
      if (!(ms.second >= 0.0))
        raise(errc::invalid_profile, "variable '" + name + "' has negative SD");
    }
  }

  Cohort cohort;
  cohort.provenance = Provenance::synthetic;
  cohort.seed = seed;
  Rng root = Rng(seed).derive("synthetic");

  std::size_t total = 0;
  for (auto n : n_per_cluster) total += n;
  std::size_t width = std::to_string(total).size();

  std::size_t serial = 0;
  for (std::size_t c = 0; c < profile.clusters.size(); ++c) {
    const auto& cl = profile.clusters[c];
    Rng rng = root.derive(cl.name).derive(c);
    const double p_female = static_cast<double>(cl.females) / static_cast<double>(cl.size);
    const double p_hc = static_cast<double>(cl.hc_members) / static_cast<double>(cl.size);

    for (std::size_t j = 0; j < n_per_cluster[c]; ++j) {
      SubjectRecord rec;
      std::string num = std::to_string(++serial);
      rec.id = "s" + std::string(width - num.size(), '0') + num;
      rec.gender = rng.uniform01() < p_female ? Gender::female : Gender::male;
      rec.cohort = rng.uniform01() < p_hc ? CohortLabel::hc : CohortLabel::clbp;

      auto draw = [&](const std::string& name, double lo, double hi, bool clamp) {
        const auto& ms = cl.variables.at(name);
        double v = ms.first + ms.second * rng.gaussian();
        if (opts.clamp && clamp) v = std::clamp(v, lo, hi);
        return v;
      };
      for (const auto& f : questionnaire_fields()) rec.*f.member = draw(f.name, f.min, f.max, f.clamp);
      for (const auto& f : demographic_fields())
        if (cl.variables.count(f.name)) rec.*f.member = draw(f.name, 0.0, 0.0, false);

      cohort.records.push_back(std::move(rec));
      cohort.true_labels.push_back(static_cast<int>(c));
    }
  }
  return cohort;
}

Cohort subgroup(const Cohort& cohort, const std::function<bool(const SubjectRecord&)>& keep) {
  Cohort out;
  out.provenance = cohort.provenance;
  out.seed = cohort.seed;
  for (std::size_t i = 0; i < cohort.records.size(); ++i) {
    if (keep(cohort.records[i])) {
      out.records.push_back(cohort.records[i]);
      if (!cohort.true_labels.empty()) out.true_labels.push_back(cohort.true_labels[i]);
    }
  }
  return out;
}

std::function<bool(const SubjectRecord&)> by_gender(Gender g) {
  return [g](const SubjectRecord& r) { return r.gender == g; };
}

std::function<bool(const SubjectRecord&)> by_cohort(CohortLabel c) {
  return [c](const SubjectRecord& r) { return r.cohort == c; };
}

}  // namespace csikit
