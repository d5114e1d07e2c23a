#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "csikit/errors.hpp"
#include "csikit/pipeline.hpp"
#include "csikit/rng.hpp"

namespace csikit {
namespace {

std::string exact(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string display2(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

class FileWriter {
public:
  explicit FileWriter(const std::filesystem::path& dir) : dir_(dir) {}

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_error, "cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out) raise(errc::io_error, "failed writing '" + path.string() + "'");
    ManifestEntry e;
    e.name = name;
    e.bytes = content.size();
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    e.fnv1a64 = hex;
    entries_.push_back(std::move(e));
  }

  std::vector<ManifestEntry> finish() {
    std::sort(entries_.begin(), entries_.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.name < b.name; });
    nlohmann::json j;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& e : entries_)
      files.push_back({{"name", e.name}, {"bytes", e.bytes}, {"fnv1a64", e.fnv1a64}});
    j["files"] = files;
    const auto path = dir_ / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(errc::io_error, "cannot write '" + path.string() + "'");
    out << j.dump(2) << "\n";
    out.close();
    if (!out) raise(errc::io_error, "failed writing '" + path.string() + "'");
    return entries_;
  }

private:
  std::filesystem::path dir_;
  std::vector<ManifestEntry> entries_;
};

std::string summary_csv(const DemographicSummary& s) {
  std::ostringstream out;
  out << "variable";
  for (const auto& g : s.group_names) out << ',' << g << "_mean," << g << "_sd," << g << "_n";
  for (const auto& [a, b] : s.pairs) out << ",p_" << s.group_names[a] << "_vs_" << s.group_names[b];
  out << "\n";

  out << "gender";
  for (std::size_t g = 0; g < s.group_names.size(); ++g) out << ',' << s.gender_counts[g] << ",,";
  for (std::size_t p = 0; p < s.pairs.size(); ++p) out << ',';
  out << "\n";

  for (const auto& row : s.rows) {
    out << row.variable;
    for (const auto& c : row.cells) out << ',' << exact(c.mean) << ',' << exact(c.sd) << ',' << c.n;
    for (double p : row.p_values) out << ',' << exact(p);
    out << "\n";
  }
  return out.str();
}

std::string table5_csv(const CutoffResult& c) {
  std::ostringstream out;
  out << "cutoff,auc,youden,sensitivity,specificity,ppv,npv,plr,nlr\n";
  for (const auto& r : c.table) {
    out << r.cutoff << ',' << display2(r.auc) << ',' << display2(r.youden) << ','
        << display2(r.sensitivity) << ',' << display2(r.specificity) << ',' << display2(r.ppv)
        << ',' << display2(r.npv) << ',' << display2(r.plr) << ',' << display2(r.nlr) << "\n";
  }
  return out.str();
}

}  // namespace

std::vector<ManifestEntry> emit_report(const PipelineReport& report,
                                       const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    raise(errc::io_error, "cannot create output directory '" + dir.string() + "'");

  FileWriter files(dir);
  files.write("report.json", report.to_json().dump(2) + "\n");

  {
    std::ostringstream out;
    out << "algorithm,silhouette,calinski_harabasz,davies_bouldin,true_hc,hc_cluster_size,"
           "n_evaluated\n";
    for (const auto& v : report.validity) {
      out << algorithm_name(v.algorithm) << ','
          << (v.silhouette ? exact(*v.silhouette) : std::string()) << ','
          << (v.calinski_harabasz ? exact(*v.calinski_harabasz) : std::string()) << ','
          << (v.davies_bouldin ? exact(*v.davies_bouldin) : std::string()) << ','
          << v.external.true_hc << ',' << v.external.hc_cluster_size << ',' << v.n_evaluated
          << "\n";
    }
    files.write("table2.csv", out.str());
  }

  for (const auto& c : report.cutoffs)
    files.write(std::string("table5_") + to_string(c.subgroup) + ".csv", table5_csv(c));

  if (const AlgorithmRun* h = report.run_for(Algorithm::hierarchical); h && h->dendrogram) {
    std::vector<std::string> ids;
    ids.reserve(report.cohort.size());
    for (const auto& r : report.cohort.records) ids.push_back(r.id);
    files.write("dendrogram.json", h->dendrogram->to_json(ids).dump(2) + "\n");
    files.write("dendrogram.nwk", h->dendrogram->to_newick(ids) + "\n");
  }

  if (const AlgorithmRun* chosen = report.run_for(report.chosen)) {
    std::ostringstream out;
    out << "id,label\n";
    for (std::size_t i = 0; i < report.cohort.size(); ++i)
      out << report.cohort.records[i].id << ',' << chosen->assignment.labels[i] << "\n";
    files.write("assignments.csv", out.str());

    std::ostringstream box;
    box << "id,cluster,role,csi,cohort,gender\n";
    for (std::size_t i = 0; i < report.cohort.size(); ++i) {
      const auto& r = report.cohort.records[i];
      const int l = chosen->assignment.labels[i];
      std::string role;
      if (report.split) {
        if (l == report.split->cluster_a) role = "A";
        if (l == report.split->cluster_b) role = "B";
        if (l == report.split->cluster_c) role = "C";
      }
      box << r.id << ',' << l << ',' << role << ',' << exact(r.csi) << ',' << to_string(r.cohort)
          << ',' << to_string(r.gender) << "\n";
    }
    files.write("boxplot_data.csv", box.str());
  }

  files.write("demographics_hc_clbp.csv", summary_csv(report.cohort_by_label));
  files.write("demographics_f_m.csv", summary_csv(report.cohort_by_gender));
  if (report.cluster_demographics)
    files.write("demographics_clusters.csv", summary_csv(*report.cluster_demographics));
  if (report.split_demographics)
    files.write("demographics_low_high.csv", summary_csv(*report.split_demographics));

  return files.finish();
}

Cohort table5_confusion_cohort() {
  // Composition realizing the reference confusion counts at cutoff 35,
  // gender-exact: high group 25F (17 positive / 8 negative) + 13M (12/1);
  // low group 49F (15/34) + 64M (12/52). Positives carry CSI 40, negatives
  // CSI 30.
  Cohort cohort;
  cohort.provenance = Provenance::synthetic;
  int serial = 0;
  auto add = [&](const char* prefix, Gender g, CohortLabel label, double csi) {
    SubjectRecord r;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%s%03d", prefix, ++serial);
    r.id = buf;
    r.gender = g;
    r.cohort = label;
    r.csi = csi;
    r.bsi = 30.0;
    cohort.records.push_back(std::move(r));
  };

  int low_hc_budget = 63;
  auto add_low = [&](Gender g, double csi) {
    const CohortLabel label = low_hc_budget > 0 ? CohortLabel::hc : CohortLabel::clbp;
    if (low_hc_budget > 0) --low_hc_budget;
    add("l", g, label, csi);
  };
  for (int i = 0; i < 15; ++i) add_low(Gender::female, 40.0);
  for (int i = 0; i < 34; ++i) add_low(Gender::female, 30.0);
  for (int i = 0; i < 12; ++i) add_low(Gender::male, 40.0);
  for (int i = 0; i < 52; ++i) add_low(Gender::male, 30.0);

  serial = 0;
  for (int i = 0; i < 17; ++i) add("h", Gender::female, CohortLabel::clbp, 40.0);
  for (int i = 0; i < 8; ++i) add("h", Gender::female, CohortLabel::clbp, 30.0);
  for (int i = 0; i < 12; ++i) add("h", Gender::male, CohortLabel::clbp, 40.0);
  for (int i = 0; i < 1; ++i) add("h", Gender::male, CohortLabel::clbp, 30.0);
  return cohort;
}

GroupSplit table5_confusion_split() {
  GroupSplit split;
  split.mode = SplitMode::ab_vs_c;
  const Cohort cohort = table5_confusion_cohort();
  for (const auto& r : cohort.records)
    (r.id[0] == 'h' ? split.high_ids : split.low_ids).push_back(r.id);
  return split;
}

std::vector<std::filesystem::path> generate_fixture(FixtureKind kind, std::uint64_t seed,
                                                    const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    raise(errc::io_error, "cannot create output directory '" + dir.string() + "'");

  std::vector<std::filesystem::path> written;
  if (kind == FixtureKind::table3_profile) {
    const auto& profile = table3_profile();
    Cohort cohort = generate_synthetic(profile, profile.sizes(), seed);
    const auto cohort_path = dir / "cohort.csv";
    write_csv(cohort, cohort_path);
    written.push_back(cohort_path);

    const auto labels_path = dir / "true_labels.csv";
    std::ofstream out(labels_path);
    if (!out) raise(errc::io_error, "cannot write '" + labels_path.string() + "'");
    out << "id,cluster\n";
    for (std::size_t i = 0; i < cohort.size(); ++i)
      out << cohort.records[i].id << ','
          << profile.clusters[static_cast<std::size_t>(cohort.true_labels[i])].name << "\n";
    if (!out) raise(errc::io_error, "failed writing '" + labels_path.string() + "'");
    written.push_back(labels_path);
  } else {
    Cohort cohort = table5_confusion_cohort();
    const auto cohort_path = dir / "cohort.csv";
    write_csv(cohort, cohort_path);
    written.push_back(cohort_path);

    GroupSplit split = table5_confusion_split();
    nlohmann::json j;
    j["mode"] = to_string(split.mode);
    j["low_ids"] = split.low_ids;
    j["high_ids"] = split.high_ids;
    const auto split_path = dir / "split.json";
    std::ofstream out(split_path);
    if (!out) raise(errc::io_error, "cannot write '" + split_path.string() + "'");
    out << j.dump(2) << "\n";
    if (!out) raise(errc::io_error, "failed writing '" + split_path.string() + "'");
    written.push_back(split_path);
  }
  return written;
}

}  // namespace csikit
