#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "zipscan/inference.hpp"
#include "zipscan/scan.hpp"
#include "zipscan/zones.hpp"

namespace zipscan {

// One synthetic surveillance configuration: constant (p, mu) baselines over
// locations scattered on the unit square.  During the newest outbreak_weeks
// periods, cells inside true_zone have mu inflated by relative_risk; p is
// untouched.
struct Scenario {
  int locations = 100;
  double p = 0.0;
  double mu = 1.0;
  double relative_risk = 1.0;  // 1 = in-control
  Zone true_zone;              // empty exactly when relative_risk == 1
  int baseline_weeks = 9;
  int outbreak_weeks = 11;
  int max_duration = 10;
  std::uint64_t seed = 0;  // fixes the geometry and the outbreak zone
};

// Uniform points on the unit square, reproducible from (n, seed) alone.
std::vector<Point> scenario_geometry(int n, std::uint64_t seed);

// The center plus its size-1 nearest neighbors; always one of the k-NN zones.
Zone nearest_neighbor_zone(const DistanceMatrix& dist, int center, int size);

// nearest_neighbor_zone around a uniformly drawn center.
Zone random_outbreak_zone(const DistanceMatrix& dist, int size, RngEngine& rng);

// Assembles a validated scenario; for relative_risk > 1 the outbreak zone is
// drawn from the scenario seed.
Scenario make_scenario(int locations, double p, double mu, double relative_risk,
                       int outbreak_size, std::uint64_t seed);

// One dataset over baseline_weeks + outbreak_weeks periods, cells drawn in
// (location, time) order.
CountGrid generate_scenario_data(const Scenario& scenario, RngEngine& rng);

struct SpatialAccuracy {
  double precision;  // |detected and true| / |detected|
  double recall;     // |detected and true| / |true|
};
SpatialAccuracy spatial_accuracy(const Zone& detected, const Zone& truth);

// Harmonic mean 2*pr*rc/(pr+rc); zero when either side is zero.
double harmonic_f(double precision, double recall);

// Linear-interpolation sample quantile (the common "type 7" definition).
double sample_quantile(std::vector<double> values, double prob);

// The outcome of scanning one weekly snapshot.
struct WeeklyOutcome {
  double p_value = 1.0;
  Zone mlc_zone;
  int mlc_duration = 0;
  double lambda = 0.0;
  double q_hat = 1.0;
};

// First week with P < alpha, plus spatial accuracy of that week's cluster.
struct DetectionMetrics {
  std::optional<int> detection_week;  // 1-based; empty when never signalled
  double precision = std::numeric_limits<double>::quiet_NaN();
  double recall = std::numeric_limits<double>::quiet_NaN();
  double f = std::numeric_limits<double>::quiet_NaN();
};
DetectionMetrics detect(std::span<const WeeklyOutcome> weeks, const Zone& truth,
                        double alpha);

struct ExperimentConfig {
  std::vector<Statistic> methods = {Statistic::kEbZip, Statistic::kEbPoisson};
  std::vector<double> alphas = {0.05};
  int datasets_per_scenario = 100;
  int null_replicates = 199;
  PValueMethod pvalue_method = PValueMethod::kGumbel;  // or kMonteCarlo
  // Replace the known baselines by a pooled zip_fit_em over each dataset's
  // baseline weeks, for both scanning and null calibration.
  bool estimate_baselines = false;
  std::uint64_t master_seed = 0;
  int threads = 1;
};

// One row per scenario x method x alpha x week.  Accuracy columns summarize
// F (and precision/recall) at detection over the datasets detected by that
// week; NaN when no dataset qualifies or the scenario has no outbreak.
struct ExperimentRow {
  int scenario_index = 0;
  int locations = 0;
  double p = 0.0;
  double mu = 0.0;
  double relative_risk = 1.0;
  int outbreak_size = 0;
  Statistic method = Statistic::kEbZip;
  double alpha = 0.05;
  int week = 1;
  int datasets = 0;
  int first_detections = 0;
  int detected_by = 0;
  double prop_detected_by = 0.0;
  double precision_median = std::numeric_limits<double>::quiet_NaN();
  double recall_median = std::numeric_limits<double>::quiet_NaN();
  double f_median = std::numeric_limits<double>::quiet_NaN();
  double f_p05 = std::numeric_limits<double>::quiet_NaN();
  double f_p95 = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentTable {
  std::vector<ExperimentRow> rows;
};

// Weekly prospective scans over simulated datasets.  Scenarios with
// relative_risk > 1 are scanned at each outbreak week; in-control scenarios
// are scanned once (their week-1 row is the false-positive rate).  Identical
// output for any thread count.
ExperimentTable run_experiment(std::span<const Scenario> scenarios,
                               const ExperimentConfig& config);

}  // namespace zipscan
