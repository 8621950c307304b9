#include "zipscan/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <thread>

namespace zipscan {

namespace {

constexpr int kZoneSizeCap = 25;  // largest candidate zone in the harness

constexpr std::uint32_t kStreamGeometry = 0x47u;
constexpr std::uint32_t kStreamOutbreakZone = 0x5Au;
constexpr std::uint32_t kStreamData = 0x44u;
constexpr std::uint32_t kStreamSharedNull = 0x4Eu;
constexpr std::uint32_t kStreamFittedNull = 0x46u;

// Runs fn(0..items-1) over at most `threads` workers.  Worker w takes items
// w, w+T, ...; outputs must be written to per-item slots so the schedule
// cannot affect results.
void parallel_for(int items, int threads, const std::function<void(int)>& fn) {
  const int n_workers = std::max(1, std::min(threads, items));
  if (n_workers == 1) {
    for (int i = 0; i < items; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n_workers);
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < items; i += n_workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

void validate_scenario(const Scenario& sc) {
  if (sc.locations < 1) throw ParameterError("scenario needs at least one location");
  check_zip_params({sc.p, sc.mu});
  if (!std::isfinite(sc.relative_risk) || sc.relative_risk < 1.0) {
    throw ParameterError("relative risk must be finite and at least 1");
  }
  if (sc.baseline_weeks < 0 || sc.outbreak_weeks < 1) {
    throw ParameterError("need non-negative baseline weeks and at least one outbreak week");
  }
  if (sc.max_duration < 1 ||
      sc.max_duration > sc.baseline_weeks + sc.outbreak_weeks) {
    throw ParameterError("max_duration must lie in [1, total weeks]");
  }
  if (sc.relative_risk > 1.0) {
    check_zip_params({sc.p, sc.relative_risk * sc.mu});
    if (sc.true_zone.members.empty()) {
      throw ParameterError("an outbreak scenario needs a non-empty true zone");
    }
    for (int m : sc.true_zone.members) {
      if (m < 0 || m >= sc.locations) {
        throw DimensionError("true zone member outside the location range");
      }
    }
  } else if (!sc.true_zone.members.empty()) {
    throw ParameterError("an in-control scenario must have an empty true zone");
  }
}

}  // namespace

std::vector<Point> scenario_geometry(int n, std::uint64_t seed) {
  if (n < 1) throw ParameterError("need at least one location");
  RngEngine rng = make_stream(seed, {kStreamGeometry});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> points(n);
  for (auto& pt : points) {
    pt.x = unit(rng);
    pt.y = unit(rng);
  }
  return points;
}

Zone nearest_neighbor_zone(const DistanceMatrix& dist, int center, int size) {
  if (size < 1 || size > dist.size()) {
    throw ParameterError("zone size must lie in [1, n]");
  }
  Zone zone;
  zone.members = nearest_neighbors(dist, center, size - 1);
  zone.members.push_back(center);
  std::sort(zone.members.begin(), zone.members.end());
  return zone;
}

Zone random_outbreak_zone(const DistanceMatrix& dist, int size, RngEngine& rng) {
  std::uniform_int_distribution<int> pick(0, dist.size() - 1);
  return nearest_neighbor_zone(dist, pick(rng), size);
}

Scenario make_scenario(int locations, double p, double mu, double relative_risk,
                       int outbreak_size, std::uint64_t seed) {
  Scenario sc;
  sc.locations = locations;
  sc.p = p;
  sc.mu = mu;
  sc.relative_risk = relative_risk;
  sc.seed = seed;
  if (relative_risk > 1.0) {
    const auto points = scenario_geometry(locations, seed);
    const DistanceMatrix dist = DistanceMatrix::from_points(points);
    RngEngine rng = make_stream(seed, {kStreamOutbreakZone});
    sc.true_zone = random_outbreak_zone(dist, outbreak_size, rng);
  }
  validate_scenario(sc);
  return sc;
}

CountGrid generate_scenario_data(const Scenario& scenario, RngEngine& rng) {
  validate_scenario(scenario);
  const int total = scenario.baseline_weeks + scenario.outbreak_weeks;
  const ZipParams base{scenario.p, scenario.mu};
  const ZipParams raised{scenario.p, scenario.relative_risk * scenario.mu};
  std::vector<char> hot(scenario.locations, 0);
  for (int m : scenario.true_zone.members) hot[m] = 1;

  CountGrid grid(scenario.locations, total);
  for (int i = 0; i < scenario.locations; ++i) {
    const bool in_zone = hot[i] != 0;
    for (int t = 0; t < total; ++t) {
      const bool outbreak_period = t < scenario.outbreak_weeks;
      grid.set(i, t, zip_sample(in_zone && outbreak_period ? raised : base, rng));
    }
  }
  return grid;
}

SpatialAccuracy spatial_accuracy(const Zone& detected, const Zone& truth) {
  if (detected.members.empty() || truth.members.empty()) {
    throw ParameterError("spatial accuracy needs non-empty zones");
  }
  std::vector<int> a = detected.members;
  std::vector<int> b = truth.members;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  const double overlap = static_cast<double>(common.size());
  return {overlap / static_cast<double>(a.size()),
          overlap / static_cast<double>(b.size())};
}

double harmonic_f(double precision, double recall) {
  if (!(precision >= 0.0 && precision <= 1.0) || !(recall >= 0.0 && recall <= 1.0)) {
    throw ParameterError("precision and recall must lie in [0, 1]");
  }
  if (precision == 0.0 || recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double sample_quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw ParameterError("quantile of an empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw ParameterError("prob must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

DetectionMetrics detect(std::span<const WeeklyOutcome> weeks, const Zone& truth,
                        double alpha) {
  if (weeks.empty()) throw ParameterError("need at least one weekly outcome");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  DetectionMetrics metrics;
  for (size_t w = 0; w < weeks.size(); ++w) {
    if (weeks[w].p_value < alpha) {
      metrics.detection_week = static_cast<int>(w) + 1;
      if (!truth.members.empty()) {
        const SpatialAccuracy acc = spatial_accuracy(weeks[w].mlc_zone, truth);
        metrics.precision = acc.precision;
        metrics.recall = acc.recall;
        metrics.f = harmonic_f(acc.precision, acc.recall);
      }
      break;
    }
  }
  return metrics;
}

namespace {

struct MethodCalibration {
  ReplicateSet set;
  GumbelParams gumbel;
};

ScanOptions harness_scan_options(Statistic method, int depth) {
  ScanOptions opts;
  opts.max_duration = depth;
  opts.statistic = method;
  opts.top_k = 1;
  opts.threads = 1;
  return opts;
}

double calibrated_pvalue(double lambda_star, const MethodCalibration& cal,
                         PValueMethod method) {
  if (method == PValueMethod::kGumbel) {
    return gumbel_pvalue(lambda_star, cal.gumbel).p_value;
  }
  return monte_carlo_pvalue(lambda_star, cal.set).p_value;
}

}  // namespace

ExperimentTable run_experiment(std::span<const Scenario> scenarios,
                               const ExperimentConfig& config) {
  if (scenarios.empty()) throw ParameterError("need at least one scenario");
  if (config.methods.empty()) throw ParameterError("need at least one method");
  if (config.alphas.empty()) throw ParameterError("need at least one alpha level");
  for (double a : config.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  }
  if (config.datasets_per_scenario < 1) {
    throw ParameterError("need at least one dataset per scenario");
  }
  if (config.null_replicates < 2) {
    throw ParameterError("need at least two null replicates");
  }
  if (config.pvalue_method == PValueMethod::kEmpirical) {
    throw ParameterError(
        "experiments calibrate from fresh replicates; use monte-carlo or gumbel");
  }
  if (config.threads < 1) throw ParameterError("threads must be at least 1");

  const int n_methods = static_cast<int>(config.methods.size());
  const int n_datasets = config.datasets_per_scenario;
  const int n_reps = config.null_replicates;

  // Null calibrations for known baselines depend only on the geometry, the
  // baseline parameters, and the scan depth, so scenarios differing in risk
  // or outbreak extent share them.
  struct SharedKey {
    int n;
    std::uint64_t seed;
    double p;
    double mu;
    int depth;
    auto operator<=>(const SharedKey&) const = default;
  };
  struct SharedEntry {
    int stream_index = 0;
    std::vector<MethodCalibration> cals;
  };
  std::map<SharedKey, SharedEntry> shared_nulls;
  int next_shared_index = 0;

  const auto shared_calibration = [&](const Scenario& sc, const ZoneSet& zones,
                                      int depth) -> const SharedEntry& {
    const SharedKey key{sc.locations, sc.seed, sc.p, sc.mu, depth};
    auto it = shared_nulls.find(key);
    if (it != shared_nulls.end()) return it->second;

    SharedEntry entry;
    entry.stream_index = next_shared_index++;
    entry.cals.resize(n_methods);
    for (auto& cal : entry.cals) {
      cal.set.values.assign(n_reps, 0.0);
      cal.set.master_seed = config.master_seed;
    }
    const BaselineGrid base =
        BaselineGrid::constant(sc.locations, depth, {sc.p, sc.mu});
    parallel_for(n_reps, config.threads, [&](int j) {
      RngEngine rng = make_stream(
          config.master_seed,
          {kStreamSharedNull, static_cast<std::uint32_t>(entry.stream_index),
           static_cast<std::uint32_t>(j + 1)});
      const CountGrid grid = simulate_null_grid(base, rng);
      for (int m = 0; m < n_methods; ++m) {
        entry.cals[m].set.values[j] =
            scan(grid, base, zones, harness_scan_options(config.methods[m], depth))
                .lambda_star;
      }
    });
    if (config.pvalue_method == PValueMethod::kGumbel) {
      for (auto& cal : entry.cals) cal.gumbel = gumbel_fit(cal.set);
    }
    return shared_nulls.emplace(key, std::move(entry)).first->second;
  };

  ExperimentTable table;
  for (size_t s_idx = 0; s_idx < scenarios.size(); ++s_idx) {
    const Scenario& sc = scenarios[s_idx];
    validate_scenario(sc);

    const auto points = scenario_geometry(sc.locations, sc.seed);
    const DistanceMatrix dist = DistanceMatrix::from_points(points);
    const int k_max = std::min(kZoneSizeCap - 1, sc.locations - 1);
    const ZoneSet zones = knn_zones(dist, k_max);

    const bool outbreak = sc.relative_risk > 1.0;
    // In-control scenarios get a single scan so their false-positive rate is
    // a per-scan probability, free of multiple-testing inflation.
    const int weeks = outbreak ? sc.outbreak_weeks : 1;
    std::vector<int> depth_at(weeks + 1, 0);
    for (int w = 1; w <= weeks; ++w) {
      depth_at[w] = std::min(sc.max_duration, sc.baseline_weeks + w);
    }

    // Known-baseline calibrations must exist before the dataset loop; the
    // cache is not guarded by a lock.
    std::map<int, const SharedEntry*> shared_by_depth;
    std::map<int, BaselineGrid> known_base_by_depth;
    if (!config.estimate_baselines) {
      for (int w = 1; w <= weeks; ++w) {
        const int depth = depth_at[w];
        if (!shared_by_depth.count(depth)) {
          shared_by_depth[depth] = &shared_calibration(sc, zones, depth);
          known_base_by_depth.emplace(
              depth, BaselineGrid::constant(sc.locations, depth, {sc.p, sc.mu}));
        }
      }
    }

    struct DatasetOutcome {
      // [method][week-1]
      std::vector<std::vector<WeeklyOutcome>> by_method;
    };
    std::vector<DatasetOutcome> outcomes(n_datasets);

    parallel_for(n_datasets, config.threads, [&](int d_idx) {
      RngEngine data_rng = make_stream(
          config.master_seed, {kStreamData, static_cast<std::uint32_t>(s_idx),
                               static_cast<std::uint32_t>(d_idx + 1)});
      const CountGrid full = generate_scenario_data(sc, data_rng);

      ZipParams fitted{sc.p, sc.mu};
      if (config.estimate_baselines) {
        // Pool every baseline-week count; the harness baseline is constant,
        // so one (p, mu) serves all cells.
        HistoricalSeries history;
        history.counts.reserve(static_cast<size_t>(sc.locations) * sc.baseline_weeks);
        for (int i = 0; i < sc.locations; ++i) {
          for (int t = sc.outbreak_weeks; t < full.periods(); ++t) {
            history.counts.push_back(full.at(i, t));
          }
        }
        fitted = zip_fit_em(history).params;
      }

      std::map<int, BaselineGrid> fitted_base_by_depth;
      std::map<int, std::vector<MethodCalibration>> fitted_cal_by_depth;
      const auto baseline_for = [&](int depth) -> const BaselineGrid& {
        if (!config.estimate_baselines) return known_base_by_depth.at(depth);
        auto it = fitted_base_by_depth.find(depth);
        if (it == fitted_base_by_depth.end()) {
          it = fitted_base_by_depth
                   .emplace(depth, BaselineGrid::constant(sc.locations, depth, fitted))
                   .first;
        }
        return it->second;
      };
      const auto calibration_for = [&](int method_index,
                                       int depth) -> const MethodCalibration& {
        if (!config.estimate_baselines) {
          return shared_by_depth.at(depth)->cals[method_index];
        }
        auto it = fitted_cal_by_depth.find(depth);
        if (it == fitted_cal_by_depth.end()) {
          std::vector<MethodCalibration> cals(n_methods);
          for (auto& cal : cals) {
            cal.set.values.assign(n_reps, 0.0);
            cal.set.master_seed = config.master_seed;
          }
          const BaselineGrid& base = baseline_for(depth);
          for (int j = 0; j < n_reps; ++j) {
            RngEngine rng = make_stream(
                config.master_seed,
                {kStreamFittedNull, static_cast<std::uint32_t>(s_idx),
                 static_cast<std::uint32_t>(d_idx + 1),
                 static_cast<std::uint32_t>(j + 1)});
            const CountGrid grid = simulate_null_grid(base, rng);
            for (int m = 0; m < n_methods; ++m) {
              cals[m].set.values[j] =
                  scan(grid, base, zones,
                       harness_scan_options(config.methods[m], depth))
                      .lambda_star;
            }
          }
          if (config.pvalue_method == PValueMethod::kGumbel) {
            for (auto& cal : cals) cal.gumbel = gumbel_fit(cal.set);
          }
          it = fitted_cal_by_depth.emplace(depth, std::move(cals)).first;
        }
        return it->second[method_index];
      };

      DatasetOutcome& out = outcomes[d_idx];
      out.by_method.assign(n_methods, std::vector<WeeklyOutcome>(weeks));
      for (int w = 1; w <= weeks; ++w) {
        const int depth = depth_at[w];
        const CountGrid snapshot = full.slice(sc.outbreak_weeks - w, depth);
        const BaselineGrid& base = baseline_for(depth);
        for (int m = 0; m < n_methods; ++m) {
          const ScanResult res = scan(snapshot, base, zones,
                                      harness_scan_options(config.methods[m], depth));
          WeeklyOutcome& weekly = out.by_method[m][w - 1];
          weekly.p_value = calibrated_pvalue(
              res.lambda_star, calibration_for(m, depth), config.pvalue_method);
          weekly.mlc_zone = zones.zones[res.mlc().window.zone_index];
          weekly.mlc_duration = res.mlc().window.duration;
          weekly.lambda = res.lambda_star;
          weekly.q_hat = res.mlc().q_hat;
        }
      }
    });

    for (int m = 0; m < n_methods; ++m) {
      for (const double alpha : config.alphas) {
        std::vector<DetectionMetrics> detections(n_datasets);
        for (int d = 0; d < n_datasets; ++d) {
          detections[d] = detect(outcomes[d].by_method[m], sc.true_zone, alpha);
        }
        for (int w = 1; w <= weeks; ++w) {
          ExperimentRow row;
          row.scenario_index = static_cast<int>(s_idx);
          row.locations = sc.locations;
          row.p = sc.p;
          row.mu = sc.mu;
          row.relative_risk = sc.relative_risk;
          row.outbreak_size = static_cast<int>(sc.true_zone.members.size());
          row.method = config.methods[m];
          row.alpha = alpha;
          row.week = w;
          row.datasets = n_datasets;
          std::vector<double> f_at, precision_at, recall_at;
          for (const auto& det : detections) {
            if (!det.detection_week) continue;
            if (*det.detection_week == w) ++row.first_detections;
            if (*det.detection_week <= w) {
              ++row.detected_by;
              if (outbreak) {
                f_at.push_back(det.f);
                precision_at.push_back(det.precision);
                recall_at.push_back(det.recall);
              }
            }
          }
          row.prop_detected_by =
              static_cast<double>(row.detected_by) / static_cast<double>(n_datasets);
          if (!f_at.empty()) {
            row.precision_median = sample_quantile(precision_at, 0.5);
            row.recall_median = sample_quantile(recall_at, 0.5);
            row.f_median = sample_quantile(f_at, 0.5);
            row.f_p05 = sample_quantile(f_at, 0.05);
            row.f_p95 = sample_quantile(f_at, 0.95);
          }
          table.rows.push_back(row);
        }
      }
    }
  }
  return table;
}

}  // namespace zipscan
