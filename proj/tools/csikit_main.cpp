#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "csikit/errors.hpp"
#include "csikit/log.hpp"
#include "csikit/pipeline.hpp"

namespace {

int exit_code_for(const csikit::Error& e) {
  switch (e.code()) {
    case csikit::errc::decomposition_failure:
      return 3;  // internal
    case csikit::errc::invalid_params:
      return 1;  // usage
    default:
      return 2;  // data
  }
}

bool parse_range(const std::string& s, int& lo, int& hi) {
  const auto pos = s.find(':');
  if (pos == std::string::npos) return false;
  try {
    lo = std::stoi(s.substr(0, pos));
    hi = std::stoi(s.substr(pos + 1));
  } catch (...) {
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace csikit;

  if (const char* env = std::getenv("CSIKIT_LOG")) {
    log::set_level(log::parse_level(env));
  } else {
    log::set_level(log::Level::info);
  }

  CLI::App app{"csikit: cohort clustering and CSI cut-off toolkit"};
  app.require_subcommand(1);

  // ---- run ----
  auto* run = app.add_subcommand("run", "run the full pipeline and write reports");
  std::string input, synthetic, cutoffs = "20:45", mode = "ab-vs-c", out_dir, vas = "ten";
  std::string sd_convention = "population", sweep;
  std::vector<std::string> algorithms, subgroups;
  std::vector<std::size_t> sizes;
  std::uint64_t seed = 0;
  std::size_t k = 3, restarts = 32, max_iter = 300, epochs = 200;
  double variance_threshold = 0.80, eps = 15.0;
  std::size_t min_pts = 15;
  int threads = 0;

  auto* input_opt = run->add_option("--input", input, "cohort CSV file");
  auto* synth_opt = run->add_option("--synthetic", synthetic, "built-in profile name (table3)");
  input_opt->excludes(synth_opt);
  synth_opt->excludes(input_opt);
  run->add_option("--sizes", sizes, "per-cluster sizes for --synthetic");
  run->add_option("--seed", seed, "master seed")->capture_default_str();
  run->add_option("--k", k, "cluster count")->capture_default_str();
  run->add_option("--variance-threshold", variance_threshold, "PCA cumulative variance threshold")
      ->capture_default_str();
  run->add_option("--eps", eps, "DBSCAN neighborhood radius")->capture_default_str();
  run->add_option("--min-pts", min_pts, "DBSCAN core threshold")->capture_default_str();
  run->add_option("--cutoffs", cutoffs, "cutoff range LO:HI")->capture_default_str();
  run->add_option("--mode", mode, "split mode: ab-vs-c | hc-vs-c")->capture_default_str();
  run->add_option("--subgroups", subgroups, "subset of: overall females males");
  run->add_option("--algorithms", algorithms, "subset of: kmeans hierarchical som dbscan");
  run->add_option("--restarts", restarts, "k-means restarts")->capture_default_str();
  run->add_option("--max-iter", max_iter, "k-means iteration cap")->capture_default_str();
  run->add_option("--epochs", epochs, "SOM epoch cap")->capture_default_str();
  run->add_option("--vas-scale", vas, "vas input scale: ten | mm")->capture_default_str();
  run->add_option("--sd", sd_convention, "SD convention: population | sample")
      ->capture_default_str();
  run->add_option("--sweep-k", sweep, "report mean silhouette for K range LO:HI");
  run->add_option("--threads", threads, "OpenMP thread count (0 = default)");
  run->add_option("--out", out_dir, "output directory")->required();

  // ---- fixture ----
  auto* fixture = app.add_subcommand("fixture", "write a reference fixture");
  std::string kind;
  std::uint64_t fixture_seed = 0;
  std::string fixture_out;
  fixture->add_option("--kind", kind, "table3_profile | table5_confusion")->required();
  fixture->add_option("--seed", fixture_seed, "seed")->capture_default_str();
  fixture->add_option("--out", fixture_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (fixture->parsed()) {
      FixtureKind fk;
      if (kind == "table3_profile") {
        fk = FixtureKind::table3_profile;
      } else if (kind == "table5_confusion") {
        fk = FixtureKind::table5_confusion;
      } else {
        std::cerr << "error: unknown fixture kind '" << kind << "'\n";
        return 1;
      }
      const auto written = generate_fixture(fk, fixture_seed, fixture_out);
      for (const auto& p : written) std::cout << p.string() << "\n";
      return 0;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    PipelineConfig config;
    if (!input.empty()) config.input = input;
    if (!synthetic.empty()) {
      SyntheticSpec spec;
      spec.profile = synthetic;
      spec.sizes = sizes;
      config.synthetic = spec;
    }
    if (input.empty() && synthetic.empty()) {
      std::cerr << "error: one of --input or --synthetic is required\n";
      return 1;
    }
    config.vas_scale = vas == "mm" ? VasScale::millimeters : VasScale::zero_to_ten;
    config.sd_convention =
        sd_convention == "sample" ? SdConvention::sample : SdConvention::population;
    config.seed = seed;
    config.k = k;
    config.variance_threshold = variance_threshold;
    config.kmeans_opts.restarts = restarts;
    config.kmeans_opts.max_iter = max_iter;
    config.som_opts.epochs = epochs;
    config.dbscan_params.eps = eps;
    config.dbscan_params.min_pts = min_pts;
    if (!parse_range(cutoffs, config.cutoff_lo, config.cutoff_hi)) {
      std::cerr << "error: --cutoffs must look like 20:45\n";
      return 1;
    }
    if (mode == "ab-vs-c") {
      config.mode = SplitMode::ab_vs_c;
    } else if (mode == "hc-vs-c") {
      config.mode = SplitMode::hc_vs_c;
    } else {
      std::cerr << "error: --mode must be ab-vs-c or hc-vs-c\n";
      return 1;
    }
    if (!algorithms.empty()) {
      config.algorithms.clear();
      for (const auto& a : algorithms) {
        if (a == "kmeans") config.algorithms.push_back(Algorithm::kmeans);
        else if (a == "hierarchical") config.algorithms.push_back(Algorithm::hierarchical);
        else if (a == "som") config.algorithms.push_back(Algorithm::som);
        else if (a == "dbscan") config.algorithms.push_back(Algorithm::dbscan);
        else {
          std::cerr << "error: unknown algorithm '" << a << "'\n";
          return 1;
        }
      }
    }
    if (!subgroups.empty()) {
      config.subgroups.clear();
      for (const auto& s : subgroups) {
        if (s == "overall") config.subgroups.push_back(Subgroup::overall);
        else if (s == "females") config.subgroups.push_back(Subgroup::females);
        else if (s == "males") config.subgroups.push_back(Subgroup::males);
        else {
          std::cerr << "error: unknown subgroup '" << s << "'\n";
          return 1;
        }
      }
    }
    if (!sweep.empty()) {
      int lo = 0, hi = 0;
      if (!parse_range(sweep, lo, hi) || lo < 2 || hi < lo) {
        std::cerr << "error: --sweep-k must look like 2:6\n";
        return 1;
      }
      config.silhouette_sweep = {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
    }

    PipelineReport report = run_pipeline(config);
    const auto manifest = emit_report(report, out_dir);
    std::cout << "wrote " << manifest.size() + 1 << " files to " << out_dir << "\n";
    for (const auto& c : report.cutoffs)
      std::cout << "optimal cutoff (" << to_string(c.subgroup) << "): " << c.optimal_cutoff
                << (c.clinically_useful ? "" : "  [below the 1.5 sens+spec rule]") << "\n";
    for (const auto& [s, reason] : report.cutoff_skips)
      std::cout << "cutoff (" << to_string(s) << ") skipped: " << reason << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
