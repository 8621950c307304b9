#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "zipscan/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"prospective space-time scan statistics for zero-inflated counts"};
  app.require_subcommand(1);

  zipscan::cli::ScanArgs scan_args;
  auto* scan_cmd =
      app.add_subcommand("scan", "score a counts grid and report the most likely cluster");
  scan_cmd->add_option("--counts", scan_args.counts, "counts CSV (location_id,time,count)")
      ->required();
  scan_cmd
      ->add_option("--baselines", scan_args.baselines,
                   "baseline CSV (location_id,time,p,mu)")
      ->required();
  scan_cmd
      ->add_option("--geometry", scan_args.geometry,
                   "coordinates CSV (location_id,x,y) or raw distance matrix")
      ->required();
  scan_cmd->add_option("--statistic", scan_args.statistic,
                       "eb-zip or eb-poisson (default eb-zip)");
  scan_cmd->add_option("--zones", scan_args.zones, "knn or flex (default knn)");
  scan_cmd->add_option("--kmax", scan_args.kmax,
                       "knn: most neighbors per zone (default: half the map); "
                       "flex: adjacency neighbor count (default 4)");
  scan_cmd->add_option("--max-size", scan_args.max_size,
                       "flex zones: largest zone size (default 10)");
  scan_cmd->add_option("--max-duration", scan_args.max_duration,
                       "longest window in periods (default: all periods)");
  scan_cmd->add_option("--pvalue", scan_args.pvalue,
                       "monte-carlo, gumbel, or empirical (default gumbel)");
  scan_cmd->add_option("--replicates", scan_args.replicates,
                       "null replicates for calibration (default 999)");
  scan_cmd->add_option("--history", scan_args.history,
                       "stored replicate values for --pvalue empirical");
  scan_cmd->add_option("--alpha", scan_args.alpha,
                       "signal threshold on the P-value (default 0.05)");
  scan_cmd->add_option("--top-k", scan_args.top_k,
                       "ranked clusters to report (default 5)");
  scan_cmd->add_option("--seed", scan_args.seed, "master seed for replication");
  scan_cmd->add_option("--threads", scan_args.threads,
                       "worker threads; never changes results (default 1)");
  scan_cmd->add_option("--out", scan_args.out, "report path (default: stdout)");

  zipscan::cli::ZonesArgs zones_args;
  auto* zones_cmd = app.add_subcommand("zones", "enumerate candidate zones");
  zones_cmd->add_option("--geometry", zones_args.geometry, "geometry file")->required();
  zones_cmd->add_option("--zones", zones_args.zones, "knn or flex (default knn)");
  zones_cmd->add_option("--kmax", zones_args.kmax, "see scan --kmax");
  zones_cmd->add_option("--max-size", zones_args.max_size,
                        "flex zones: largest zone size (default 10)");
  zones_cmd->add_option("--out", zones_args.out, "zones CSV path (default: stdout)");

  zipscan::cli::CalibrateArgs calibrate_args;
  auto* calibrate_cmd = app.add_subcommand(
      "calibrate", "store null scan statistics for later empirical P-values");
  calibrate_cmd
      ->add_option("--baselines", calibrate_args.baselines, "baseline CSV")
      ->required();
  calibrate_cmd->add_option("--geometry", calibrate_args.geometry, "geometry file")
      ->required();
  calibrate_cmd->add_option("--statistic", calibrate_args.statistic,
                            "eb-zip or eb-poisson (default eb-zip)");
  calibrate_cmd->add_option("--zones", calibrate_args.zones, "knn or flex");
  calibrate_cmd->add_option("--kmax", calibrate_args.kmax, "see scan --kmax");
  calibrate_cmd->add_option("--max-size", calibrate_args.max_size,
                            "flex zones: largest zone size");
  calibrate_cmd->add_option("--max-duration", calibrate_args.max_duration,
                            "longest window in periods (default: all periods)");
  calibrate_cmd->add_option("--replicates", calibrate_args.replicates,
                            "replicates to store (default 999)");
  calibrate_cmd->add_option("--seed", calibrate_args.seed, "master seed")->required();
  calibrate_cmd->add_option("--threads", calibrate_args.threads, "worker threads");
  calibrate_cmd->add_option("--out", calibrate_args.out, "history CSV path")
      ->required();

  zipscan::cli::SimulateArgs simulate_args;
  auto* simulate_cmd =
      app.add_subcommand("simulate", "run the synthetic outbreak experiment");
  simulate_cmd->add_option("--config", simulate_args.config, "experiment JSON")
      ->required();
  simulate_cmd->add_option("--seed", simulate_args.seed,
                           "override the seed in the config");
  simulate_cmd->add_option("--threads", simulate_args.threads, "worker threads");
  simulate_cmd->add_option("--out", simulate_args.out, "results CSV path")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (scan_cmd->parsed()) return zipscan::cli::run_scan(scan_args);
    if (zones_cmd->parsed()) return zipscan::cli::run_zones(zones_args);
    if (calibrate_cmd->parsed()) return zipscan::cli::run_calibrate(calibrate_args);
    if (simulate_cmd->parsed()) return zipscan::cli::run_simulate(simulate_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
