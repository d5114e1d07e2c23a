#include "csikit/pipeline.hpp"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "csikit/errors.hpp"
#include "csikit/log.hpp"

namespace csikit {
namespace {

template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) {
  try {
    log::debug(std::string("stage ") + stage);
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage '") + stage + "': " + e.what());
  }
}

const std::vector<std::string>& summary_variables() {
  static const std::vector<std::string> vars = {"age", "height", "weight", "bmi",
                                                "vas", "pdi",    "was",    "rand36_pf",
                                                "pcs", "ieq",    "bsi",    "csi"};
  return vars;
}

nlohmann::json summary_to_json(const DemographicSummary& s) {
  nlohmann::json j;
  j["groups"] = s.group_names;
  j["gender_counts"] = s.gender_counts;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : s.pairs) pairs.push_back({s.group_names[a], s.group_names[b]});
  j["pairs"] = pairs;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : s.rows) {
    nlohmann::json r;
    r["variable"] = row.variable;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : row.cells) cells.push_back({{"mean", c.mean}, {"sd", c.sd}, {"n", c.n}});
    r["cells"] = cells;
    r["p_values"] = row.p_values;
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j;
}

nlohmann::json row_to_json(const DiagnosticRow& r) {
  return {{"cutoff", r.cutoff},
          {"tp", r.tp},
          {"fp", r.fp},
          {"tn", r.tn},
          {"fn", r.fn},
          {"sensitivity", r.sensitivity},
          {"specificity", r.specificity},
          {"auc", r.auc},
          {"youden", r.youden},
          {"ppv", r.ppv},
          {"npv", r.npv},
          {"plr", r.plr},
          {"nlr", r.nlr}};
}

}  // namespace

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j;
  j["input"] = input ? nlohmann::json(input->string()) : nlohmann::json();
  if (synthetic) {
    j["synthetic"] = {{"profile", synthetic->profile}, {"sizes", synthetic->sizes}};
  } else {
    j["synthetic"] = nullptr;
  }
  j["vas_scale"] = vas_scale == VasScale::zero_to_ten ? "0-10" : "mm";
  j["sd_convention"] = sd_convention == SdConvention::population ? "population" : "sample";
  j["seed"] = seed;
  j["k"] = k;
  j["variance_threshold"] = variance_threshold;
  j["variance_retention_rule"] = "smallest m with cumulative ratio >= threshold";
  std::vector<std::string> algs;
  for (auto a : algorithms) algs.emplace_back(algorithm_name(a));
  j["algorithms"] = algs;
  j["kmeans"] = {{"restarts", kmeans_opts.restarts}, {"max_iter", kmeans_opts.max_iter}};
  j["som"] = {{"epochs", som_opts.epochs},
              {"lr_start", som_opts.lr_start},
              {"lr_end", som_opts.lr_end},
              {"sigma_end", som_opts.sigma_end},
              {"displacement_tol", som_opts.displacement_tol}};
  j["dbscan"] = {{"eps", dbscan_params.eps}, {"min_pts", dbscan_params.min_pts}};
  j["cutoffs"] = {{"lo", cutoff_lo}, {"hi", cutoff_hi}};
  j["mode"] = to_string(mode);
  std::vector<std::string> subs;
  for (auto s : subgroups) subs.emplace_back(to_string(s));
  j["subgroups"] = subs;
  if (silhouette_sweep) {
    j["silhouette_sweep"] = {{"lo", silhouette_sweep->first}, {"hi", silhouette_sweep->second}};
  } else {
    j["silhouette_sweep"] = nullptr;
  }
  return j;
}

const AlgorithmRun* PipelineReport::run_for(Algorithm a) const {
  for (const auto& r : runs)
    if (r.assignment.algorithm == a) return &r;
  return nullptr;
}

const CutoffResult* PipelineReport::cutoff_for(Subgroup s) const {
  for (const auto& c : cutoffs)
    if (c.subgroup == s) return &c;
  return nullptr;
}

GroupSplit filter_split_by_gender(const GroupSplit& split, const Cohort& cohort, Gender gender) {
  std::map<std::string, Gender> gender_of;
  for (const auto& r : cohort.records) gender_of[r.id] = r.gender;
  GroupSplit out;
  out.mode = split.mode;
  out.cluster_a = split.cluster_a;
  out.cluster_b = split.cluster_b;
  out.cluster_c = split.cluster_c;
  for (const auto& id : split.low_ids)
    if (gender_of.at(id) == gender) out.low_ids.push_back(id);
  for (const auto& id : split.high_ids)
    if (gender_of.at(id) == gender) out.high_ids.push_back(id);
  return out;
}

PipelineReport run_pipeline(const PipelineConfig& config) {
  if (config.input.has_value() == config.synthetic.has_value())
    raise(errc::invalid_params, "exactly one of input / synthetic must be set");
  if (!(config.variance_threshold > 0.0 && config.variance_threshold <= 1.0))
    raise(errc::invalid_params, "variance threshold must be in (0, 1]");
  if (config.k < 2) raise(errc::invalid_params, "k must be >= 2");
  if (config.cutoff_lo > config.cutoff_hi) raise(errc::invalid_params, "empty cutoff range");
  if (config.algorithms.empty()) raise(errc::invalid_params, "no algorithms selected");

  PipelineReport report;
  report.seed = config.seed;
  report.config_echo = config.to_json();

  with_stage("ingest", [&] {
    if (config.input) {
      IngestOptions opts;
      opts.vas_scale = config.vas_scale;
      auto res = ingest_csv(*config.input, opts);
      report.cohort = std::move(res.cohort);
      report.excluded_rows = res.excluded_rows;
    } else {
      if (config.synthetic->profile != "table3")
        raise(errc::invalid_params, "unknown synthetic profile '" + config.synthetic->profile + "'");
      const auto& profile = table3_profile();
      std::vector<std::size_t> sizes =
          config.synthetic->sizes.empty() ? profile.sizes() : config.synthetic->sizes;
      report.cohort = generate_synthetic(profile, sizes, config.seed);
      report.excluded_rows = 0;
    }
    log::info("cohort: " + std::to_string(report.cohort.size()) + " subjects, " +
              std::to_string(report.excluded_rows) + " excluded");
    return 0;
  });

  FeatureMatrix encoded = with_stage("encode", [&] { return encode_features(report.cohort); });

  FeatureMatrix standardized = with_stage("standardize", [&] {
    auto [params, z] = fit_standardize(encoded, config.sd_convention);
    report.standardization = std::move(params);
    return z;
  });

  FeatureMatrix reduced = with_stage("pca", [&] {
    report.pca = fit_pca(standardized, config.variance_threshold);
    log::info("pca: retained " + std::to_string(report.pca.retained) + " of " +
              std::to_string(standardized.n_cols()) + " components");
    report.feature_importance = feature_importance(report.pca);
    return transform(report.pca, standardized);
  });

  with_stage("cluster", [&] {
    for (Algorithm a : config.algorithms) {
      AlgorithmRun run;
      switch (a) {
        case Algorithm::kmeans:
          run.assignment = kmeans(reduced, config.k, config.seed, config.kmeans_opts);
          break;
        case Algorithm::hierarchical: {
          auto res = hierarchical(reduced, config.k);
          run.assignment = std::move(res.assignment);
          run.dendrogram = std::move(res.dendrogram);
          break;
        }
        case Algorithm::som: {
          auto res = som(reduced, config.k, config.seed, config.som_opts);
          run.assignment = std::move(res.assignment);
          run.som_grid = std::move(res.grid);
          break;
        }
        case Algorithm::dbscan:
          run.assignment = dbscan(reduced, config.dbscan_params);
          break;
      }
      log::info(std::string("clustered: ") + algorithm_name(a) + " -> k=" +
                std::to_string(run.assignment.k));
      report.runs.push_back(std::move(run));
    }
    return 0;
  });

  with_stage("validate", [&] {
    for (const auto& run : report.runs)
      report.validity.push_back(evaluate_clustering(reduced, run.assignment, report.cohort));
    report.chosen = select_best(report.validity);
    log::info(std::string("selected algorithm: ") + algorithm_name(report.chosen));
    return 0;
  });

  with_stage("demographics", [&] {
    const Cohort hc = subgroup(report.cohort, by_cohort(CohortLabel::hc));
    const Cohort clbp = subgroup(report.cohort, by_cohort(CohortLabel::clbp));
    const Cohort f = subgroup(report.cohort, by_gender(Gender::female));
    const Cohort m = subgroup(report.cohort, by_gender(Gender::male));
    std::vector<std::pair<std::string, const Cohort*>> by_label = {{"HC", &hc}, {"CLBP", &clbp}};
    std::vector<std::pair<std::string, const Cohort*>> by_gen = {{"F", &f}, {"M", &m}};
    report.cohort_by_label = demographic_summary(by_label, summary_variables());
    report.cohort_by_gender = demographic_summary(by_gen, summary_variables());
    return 0;
  });

  const AlgorithmRun* chosen_run = report.run_for(report.chosen);
  with_stage("split", [&] {
    if (chosen_run->assignment.k != 3) {
      report.split_skip_reason = "chosen clustering has k=" +
                                 std::to_string(chosen_run->assignment.k) +
                                 "; split and cutoff stages need exactly 3 clusters";
      log::info("split skipped: " + report.split_skip_reason);
      return 0;
    }
    report.split = build_split(chosen_run->assignment, report.cohort, config.mode);

    // Cluster demographic tables keyed by the identified roles A/B/C.
    std::map<int, std::string> role = {{report.split->cluster_a, "A"},
                                       {report.split->cluster_b, "B"},
                                       {report.split->cluster_c, "C"}};
    std::map<std::string, Cohort> role_cohorts;
    role_cohorts["A"];
    role_cohorts["B"];
    role_cohorts["C"];
    for (std::size_t i = 0; i < report.cohort.records.size(); ++i) {
      const int l = chosen_run->assignment.labels[i];
      if (l < 0) continue;
      role_cohorts[role.at(l)].records.push_back(report.cohort.records[i]);
    }
    std::vector<std::pair<std::string, const Cohort*>> groups;
    for (const auto& [name, c] : role_cohorts) groups.emplace_back(name, &c);
    report.cluster_demographics = demographic_summary(groups, summary_variables());

    std::set<std::string> low_set(report.split->low_ids.begin(), report.split->low_ids.end());
    std::set<std::string> high_set(report.split->high_ids.begin(), report.split->high_ids.end());
    Cohort low = subgroup(report.cohort,
                          [&](const SubjectRecord& r) { return low_set.count(r.id) > 0; });
    Cohort high = subgroup(report.cohort,
                           [&](const SubjectRecord& r) { return high_set.count(r.id) > 0; });
    std::vector<std::pair<std::string, const Cohort*>> lh = {{"low", &low}, {"high", &high}};
    report.split_demographics = demographic_summary(lh, summary_variables());
    return 0;
  });

  with_stage("cutoff", [&] {
    if (!report.split) {
      for (Subgroup s : config.subgroups)
        report.cutoff_skips.emplace_back(s, report.split_skip_reason);
      return 0;
    }
    for (Subgroup s : config.subgroups) {
      GroupSplit view = *report.split;
      if (s == Subgroup::females)
        view = filter_split_by_gender(view, report.cohort, Gender::female);
      if (s == Subgroup::males) view = filter_split_by_gender(view, report.cohort, Gender::male);
      if (view.low_ids.empty() || view.high_ids.empty()) {
        report.cutoff_skips.emplace_back(s, "empty low or high group for this subgroup");
        continue;
      }
      auto table = diagnostic_table(view, report.cohort, config.cutoff_lo, config.cutoff_hi);
      CutoffResult res = select_cutoff(std::move(table));
      res.subgroup = s;
      res.roc_auc = roc_auc_trapezoid(view, report.cohort);
      log::info(std::string("cutoff[") + to_string(s) +
                "]: " + std::to_string(res.optimal_cutoff));
      report.cutoffs.push_back(std::move(res));
    }
    return 0;
  });

  if (config.silhouette_sweep) {
    with_stage("silhouette-sweep", [&] {
      auto [lo, hi] = *config.silhouette_sweep;
      if (lo < 2 || lo > hi) raise(errc::invalid_params, "sweep range must satisfy 2 <= lo <= hi");
      for (std::size_t kk = lo; kk <= hi && kk <= reduced.n_rows(); ++kk) {
        auto res = hierarchical(reduced, kk);
        report.silhouette_sweep.emplace_back(kk, silhouette(reduced, res.assignment));
      }
      return 0;
    });
  }

  return report;
}

nlohmann::json PipelineReport::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["seed"] = seed;
  j["config"] = config_echo;

  std::size_t n_hc = 0, n_f = 0;
  for (const auto& r : cohort.records) {
    if (r.cohort == CohortLabel::hc) ++n_hc;
    if (r.gender == Gender::female) ++n_f;
  }
  j["dataset"] = {{"n", cohort.size()},
                  {"n_hc", n_hc},
                  {"n_clbp", cohort.size() - n_hc},
                  {"n_female", n_f},
                  {"n_male", cohort.size() - n_f},
                  {"excluded_rows", excluded_rows},
                  {"provenance", cohort.provenance == Provenance::synthetic ? "synthetic" : "ingested"},
                  {"synthetic_note", cohort.provenance == Provenance::synthetic
                                         ? "variables drawn as independent per-cluster Gaussians "
                                           "(profile reports means/SDs only), clamped to valid ranges"
                                         : ""}};

  j["standardization"] = {{"columns", standardization.column_names},
                          {"mean", standardization.mean},
                          {"sd", standardization.sd},
                          {"convention", standardization.convention == SdConvention::population
                                             ? "population"
                                             : "sample"}};
  j["pca"] = pca.to_json();

  nlohmann::json imp = nlohmann::json::array();
  for (const auto& [name, score] : feature_importance)
    imp.push_back({{"feature", name}, {"score", score}});
  j["feature_importance"] = imp;

  nlohmann::json algs;
  for (const auto& run : runs) {
    nlohmann::json a;
    a["k"] = run.assignment.k;
    a["labels"] = run.assignment.labels;
    a["params"] = run.assignment.params;
    a["n_noise"] = run.assignment.n_noise();
    a["sizes"] = run.assignment.cluster_sizes();
    if (run.assignment.inertia) a["inertia"] = *run.assignment.inertia;
    if (run.assignment.seed) a["seed"] = *run.assignment.seed;
    if (run.som_grid)
      a["grid"] = {{"width", run.som_grid->width}, {"height", run.som_grid->height}};
    algs[algorithm_name(run.assignment.algorithm)] = a;
  }
  j["algorithms"] = algs;

  nlohmann::json vals = nlohmann::json::array();
  for (const auto& v : validity) {
    nlohmann::json r;
    r["algorithm"] = algorithm_name(v.algorithm);
    r["silhouette"] = v.silhouette ? nlohmann::json(*v.silhouette) : nlohmann::json();
    r["calinski_harabasz"] =
        v.calinski_harabasz ? nlohmann::json(*v.calinski_harabasz) : nlohmann::json();
    r["davies_bouldin"] = v.davies_bouldin ? nlohmann::json(*v.davies_bouldin) : nlohmann::json();
    r["external"] = {{"true_hc", v.external.true_hc},
                     {"hc_cluster_size", v.external.hc_cluster_size}};
    r["n_evaluated"] = v.n_evaluated;
    vals.push_back(r);
  }
  j["validity"] = vals;
  j["chosen_algorithm"] = algorithm_name(chosen);

  if (split) {
    j["split"] = {{"mode", to_string(split->mode)},
                  {"cluster_a", split->cluster_a},
                  {"cluster_b", split->cluster_b},
                  {"cluster_c", split->cluster_c},
                  {"low_ids", split->low_ids},
                  {"high_ids", split->high_ids},
                  {"n_low", split->low_ids.size()},
                  {"n_high", split->high_ids.size()}};
  } else {
    j["split"] = nullptr;
    j["split_skip_reason"] = split_skip_reason;
  }

  nlohmann::json demo;
  demo["hc_vs_clbp"] = summary_to_json(cohort_by_label);
  demo["females_vs_males"] = summary_to_json(cohort_by_gender);
  demo["clusters"] = cluster_demographics ? summary_to_json(*cluster_demographics) : nlohmann::json();
  demo["low_vs_high"] = split_demographics ? summary_to_json(*split_demographics) : nlohmann::json();
  j["demographics"] = demo;

  nlohmann::json cuts;
  for (const auto& c : cutoffs) {
    nlohmann::json e;
    e["optimal_cutoff"] = c.optimal_cutoff;
    e["clinically_useful"] = c.clinically_useful;
    e["roc_auc_trapezoid"] = c.roc_auc;
    e["optimal"] = row_to_json(c.optimal);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : c.table) rows.push_back(row_to_json(r));
    e["table"] = rows;
    cuts[to_string(c.subgroup)] = e;
  }
  j["cutoffs"] = cuts;
  nlohmann::json skips;
  for (const auto& [s, reason] : cutoff_skips) skips[to_string(s)] = reason;
  j["cutoff_skips"] = skips;

  if (!silhouette_sweep.empty()) {
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& [kk, v] : silhouette_sweep) sweep.push_back({{"k", kk}, {"silhouette", v}});
    j["silhouette_sweep"] = sweep;
  } else {
    j["silhouette_sweep"] = nullptr;
  }
  return j;
}

}  // namespace csikit
