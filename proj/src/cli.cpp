#include "zipscan/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "zipscan/inference.hpp"
#include "zipscan/io.hpp"
#include "zipscan/scan.hpp"
#include "zipscan/simulation.hpp"
#include "zipscan/zones.hpp"

namespace zipscan::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

PValueMethod parse_pvalue_method(const std::string& name) {
  if (name == "monte-carlo") return PValueMethod::kMonteCarlo;
  if (name == "gumbel") return PValueMethod::kGumbel;
  if (name == "empirical") return PValueMethod::kEmpirical;
  throw ParameterError("unknown pvalue method '" + name +
                       "' (expected monte-carlo, gumbel, or empirical)");
}

// Reorders baseline rows into the counts' location order; the two files must
// cover exactly the same locations and periods.
BaselineGrid align_baselines(const std::vector<std::string>& ids, int periods,
                             const BaselineData& baselines,
                             const std::string& file) {
  const int n = static_cast<int>(ids.size());
  if (baselines.grid.periods() != periods) {
    throw ParseError(file, 0,
                     "baselines cover " + std::to_string(baselines.grid.periods()) +
                         " periods but counts cover " + std::to_string(periods));
  }
  if (static_cast<int>(baselines.location_ids.size()) != n) {
    throw ParseError(file, 0,
                     "baselines cover " +
                         std::to_string(baselines.location_ids.size()) +
                         " locations but counts cover " + std::to_string(n));
  }
  std::unordered_map<std::string, int> position;
  for (int i = 0; i < n; ++i) position.emplace(ids[i], i);
  BaselineGrid out(n, periods);
  for (size_t b = 0; b < baselines.location_ids.size(); ++b) {
    const auto it = position.find(baselines.location_ids[b]);
    if (it == position.end()) {
      throw ParseError(file, 0,
                       "location '" + baselines.location_ids[b] +
                           "' is not present in the counts file");
    }
    for (int t = 0; t < periods; ++t) {
      out.set(it->second, t, baselines.grid.at(static_cast<int>(b), t));
    }
  }
  return out;
}

// Distances in the order of `ids`.  Matrix geometry carries no ids and pairs
// with the ids positionally.
DistanceMatrix align_geometry(const std::vector<std::string>& ids,
                              const GeometryData& geometry,
                              const std::string& file) {
  const int n = static_cast<int>(ids.size());
  if (geometry.kind == GeometryKind::kMatrix) {
    if (geometry.distances.size() != n) {
      throw ParseError(file, 0,
                       "distance matrix covers " +
                           std::to_string(geometry.distances.size()) +
                           " locations but the data covers " + std::to_string(n));
    }
    return geometry.distances;
  }
  if (static_cast<int>(geometry.location_ids.size()) != n) {
    throw ParseError(file, 0,
                     "geometry covers " +
                         std::to_string(geometry.location_ids.size()) +
                         " locations but the data covers " + std::to_string(n));
  }
  std::unordered_map<std::string, int> position;
  for (size_t g = 0; g < geometry.location_ids.size(); ++g) {
    position.emplace(geometry.location_ids[g], static_cast<int>(g));
  }
  std::vector<Point> points(n);
  for (int i = 0; i < n; ++i) {
    const auto it = position.find(ids[i]);
    if (it == position.end()) {
      throw ParseError(file, 0,
                       "location '" + ids[i] + "' is missing from the geometry file");
    }
    points[i] = geometry.points[it->second];
  }
  return DistanceMatrix::from_points(points);
}

struct BuiltZones {
  ZoneSet set;
  std::string method;
  int kmax = 0;
  int max_size = 0;
};

BuiltZones build_zones(const DistanceMatrix& dist, const std::string& method,
                       int kmax, int max_size) {
  const int n = dist.size();
  BuiltZones out;
  out.method = method;
  if (method == "knn") {
    int k = kmax;
    if (k < 0) k = n >= 2 ? max_k_for_half(n) : 0;
    if (k > n - 1) throw ParameterError("kmax must be at most n-1");
    out.set = knn_zones(dist, k);
    out.kmax = k;
    out.max_size = k + 1;
  } else if (method == "flex") {
    const int k = kmax < 0 ? std::min(4, n - 1) : kmax;
    if (max_size < 1 || max_size > n) {
      throw ParameterError("max-size must lie in [1, n]");
    }
    out.set = flex_zones(dist, adjacency_from_knn(dist, k), max_size);
    out.kmax = k;
    out.max_size = max_size;
  } else {
    throw ParameterError("unknown zones method '" + method +
                         "' (expected knn or flex)");
  }
  return out;
}

int resolve_max_duration(int requested, int periods) {
  if (requested == 0) return periods;
  if (requested < 1 || requested > periods) {
    throw ParameterError("max-duration must lie in [1, " + std::to_string(periods) +
                         "]");
  }
  return requested;
}

void write_text(const std::filesystem::path& out, const std::string& content) {
  if (out.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream stream(out, std::ios::binary);
  if (!stream) throw ParseError(out.string(), 0, "cannot open file for writing");
  stream << content;
  if (!stream) throw ParseError(out.string(), 0, "write failed");
}

}  // namespace

int run_scan(const ScanArgs& args) {
  if (!(args.alpha > 0.0 && args.alpha < 1.0)) {
    throw ParameterError("alpha must lie in (0, 1)");
  }
  if (args.top_k < 1) throw ParameterError("top-k must be at least 1");
  if (args.threads < 1) throw ParameterError("threads must be at least 1");
  const Statistic statistic = parse_method(args.statistic);
  const PValueMethod pvalue_method = parse_pvalue_method(args.pvalue);

  const CountData counts = ingest_counts(args.counts);
  const BaselineData baselines = ingest_baselines(args.baselines);
  const GeometryData geometry = ingest_geometry(args.geometry);
  const BaselineGrid base =
      align_baselines(counts.location_ids, counts.grid.periods(), baselines,
                      args.baselines.string());
  const DistanceMatrix dist =
      align_geometry(counts.location_ids, geometry, args.geometry.string());
  const BuiltZones zones = build_zones(dist, args.zones, args.kmax, args.max_size);

  ScanOptions options;
  options.max_duration = resolve_max_duration(args.max_duration, counts.grid.periods());
  options.statistic = statistic;
  options.top_k = args.top_k;
  options.threads = args.threads;
  const ScanResult result = scan(counts.grid, base, zones.set, options);

  PValueReport pvalue;
  GumbelParams gumbel{};
  bool have_gumbel = false;
  double zero_fraction = 0.0;
  bool have_zero_fraction = false;
  if (pvalue_method == PValueMethod::kEmpirical) {
    if (args.history.empty()) {
      throw ParameterError("--history is required with --pvalue empirical");
    }
    const std::vector<double> history = ingest_history(args.history);
    pvalue = empirical_pvalue(result.lambda_star, history);
  } else {
    if (!args.seed) {
      throw ParameterError("--seed is required when calibrating from replicates");
    }
    const int min_reps = pvalue_method == PValueMethod::kGumbel ? 2 : 1;
    if (args.replicates < min_reps) {
      throw ParameterError("need at least " + std::to_string(min_reps) +
                           " replicates for --pvalue " + args.pvalue);
    }
    const ReplicateSet replicates =
        run_replication(base, zones.set, options, args.replicates, *args.seed,
                        args.threads);
    zero_fraction = replicates.zero_fraction();
    have_zero_fraction = true;
    if (pvalue_method == PValueMethod::kGumbel) {
      gumbel = gumbel_fit(replicates);
      have_gumbel = true;
      pvalue = gumbel_pvalue(result.lambda_star, gumbel);
      pvalue.sample_size = args.replicates;
    } else {
      pvalue = monte_carlo_pvalue(result.lambda_star, replicates);
    }
  }
  const bool signal = pvalue.p_value < args.alpha;

  ordered_json report;
  report["tool"] = "zipscan";
  report["version"] = kVersion;
  report["command"] = "scan";
  {
    ordered_json cfg;
    cfg["counts"] = args.counts.string();
    cfg["baselines"] = args.baselines.string();
    cfg["geometry"] = args.geometry.string();
    cfg["statistic"] = method_name(statistic);
    {
      ordered_json zcfg;
      zcfg["method"] = zones.method;
      zcfg["kmax"] = zones.kmax;
      zcfg["max_size"] = zones.max_size;
      cfg["zones"] = zcfg;
    }
    cfg["max_duration"] = options.max_duration;
    cfg["pvalue"] = args.pvalue;
    if (pvalue_method == PValueMethod::kEmpirical) {
      cfg["history"] = args.history.string();
    } else {
      cfg["replicates"] = args.replicates;
      cfg["seed"] = *args.seed;
    }
    cfg["alpha"] = args.alpha;
    cfg["top_k"] = args.top_k;
    report["config"] = cfg;
  }
  {
    ordered_json data;
    data["locations"] = counts.grid.n_locations();
    data["periods"] = counts.grid.periods();
    report["data"] = data;
  }
  {
    size_t largest = 0;
    for (const auto& z : zones.set.zones) largest = std::max(largest, z.members.size());
    ordered_json zinfo;
    zinfo["count"] = zones.set.zones.size();
    zinfo["largest"] = largest;
    report["zones"] = zinfo;
  }
  const auto window_json = [&](const WindowScore& score) {
    ordered_json w;
    ordered_json members = ordered_json::array();
    for (int m : zones.set.zones[score.window.zone_index].members) {
      members.push_back(counts.location_ids[m]);
    }
    w["locations"] = members;
    w["duration"] = score.window.duration;
    w["q_hat"] = score.q_hat;
    w["lambda"] = score.lambda;
    w["em_iterations"] = score.em_iterations;
    w["converged"] = score.converged;
    return w;
  };
  {
    ordered_json scan_info;
    scan_info["statistic"] = method_name(statistic);
    scan_info["lambda_star"] = result.lambda_star;
    scan_info["windows_evaluated"] = result.windows_evaluated;
    scan_info["non_converged_windows"] = result.non_converged_windows;
    scan_info["mlc"] = window_json(result.mlc());
    ordered_json top = ordered_json::array();
    for (size_t r = 0; r < result.ranked.size(); ++r) {
      ordered_json entry = window_json(result.ranked[r]);
      entry["rank"] = r + 1;
      top.push_back(entry);
    }
    scan_info["top"] = top;
    report["scan"] = scan_info;
  }
  {
    ordered_json inference;
    inference["method"] = args.pvalue;
    inference["p_value"] = pvalue.p_value;
    inference["sample_size"] = pvalue.sample_size;
    if (have_gumbel) {
      ordered_json g;
      g["location"] = gumbel.location;
      g["scale"] = gumbel.scale;
      inference["gumbel"] = g;
    }
    if (have_zero_fraction) inference["zero_fraction"] = zero_fraction;
    inference["alpha"] = args.alpha;
    inference["signal"] = signal;
    report["inference"] = inference;
  }
  write_text(args.out, report.dump(2) + "\n");

  std::cerr << "scanned " << result.windows_evaluated << " windows; lambda* = "
            << result.lambda_star << "; P = " << pvalue.p_value
            << (signal ? " (signal)" : "") << '\n';
  return signal ? 2 : 0;
}

int run_zones(const ZonesArgs& args) {
  const GeometryData geometry = ingest_geometry(args.geometry);
  std::vector<std::string> ids = geometry.location_ids;
  if (geometry.kind == GeometryKind::kMatrix) {
    for (int i = 0; i < geometry.distances.size(); ++i) {
      ids.push_back(std::to_string(i));
    }
  }
  const BuiltZones zones =
      build_zones(geometry.distances, args.zones, args.kmax, args.max_size);
  std::string out = "zone,size,members\n";
  for (size_t z = 0; z < zones.set.zones.size(); ++z) {
    const auto& members = zones.set.zones[z].members;
    out += std::to_string(z);
    out += ',';
    out += std::to_string(members.size());
    out += ',';
    for (size_t m = 0; m < members.size(); ++m) {
      if (m > 0) out += ';';
      out += ids[members[m]];
    }
    out += '\n';
  }
  write_text(args.out, out);
  std::cerr << "built " << zones.set.zones.size() << " zones (" << zones.method
            << ")\n";
  return 0;
}

int run_calibrate(const CalibrateArgs& args) {
  if (args.threads < 1) throw ParameterError("threads must be at least 1");
  if (args.replicates < 1) throw ParameterError("need at least one replicate");
  if (!args.seed) throw ParameterError("--seed is required for calibration");
  if (args.out.empty()) throw ParameterError("--out is required for calibration");
  const Statistic statistic = parse_method(args.statistic);

  const BaselineData baselines = ingest_baselines(args.baselines);
  const GeometryData geometry = ingest_geometry(args.geometry);
  const DistanceMatrix dist =
      align_geometry(baselines.location_ids, geometry, args.geometry.string());
  const BuiltZones zones = build_zones(dist, args.zones, args.kmax, args.max_size);

  ScanOptions options;
  options.max_duration =
      resolve_max_duration(args.max_duration, baselines.grid.periods());
  options.statistic = statistic;
  options.top_k = 1;
  const ReplicateSet replicates =
      run_replication(baselines.grid, zones.set, options, args.replicates,
                      *args.seed, args.threads);
  write_history(args.out, replicates.values);
  std::cerr << "wrote " << args.replicates << " replicate values to "
            << args.out.string() << '\n';
  return 0;
}

namespace {

// Accepts either a number or an array of numbers.
std::vector<double> config_doubles(const nlohmann::json& config,
                                   const std::string& key) {
  const auto& value = config.at(key);
  std::vector<double> out;
  if (value.is_number()) {
    out.push_back(value.get<double>());
  } else if (value.is_array() && !value.empty()) {
    for (const auto& v : value) {
      if (!v.is_number()) {
        throw ParameterError("config key '" + key + "' must contain numbers");
      }
      out.push_back(v.get<double>());
    }
  } else {
    throw ParameterError("config key '" + key +
                         "' must be a number or a non-empty array of numbers");
  }
  return out;
}

std::vector<int> config_ints(const nlohmann::json& config, const std::string& key) {
  std::vector<int> out;
  for (double v : config_doubles(config, key)) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
      throw ParameterError("config key '" + key + "' must contain integers");
    }
    out.push_back(i);
  }
  return out;
}

int config_int(const nlohmann::json& config, const std::string& key, int fallback) {
  if (!config.contains(key)) return fallback;
  if (!config.at(key).is_number_integer()) {
    throw ParameterError("config key '" + key + "' must be an integer");
  }
  return config.at(key).get<int>();
}

}  // namespace

int run_simulate(const SimulateArgs& args) {
  if (args.threads < 1) throw ParameterError("threads must be at least 1");
  if (args.out.empty()) throw ParameterError("--out is required for simulation");

  std::ifstream in(args.config);
  if (!in) throw ParseError(args.config.string(), 0, "cannot open file");
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(args.config.string(), 0, e.what());
  }
  if (!config.is_object()) {
    throw ParseError(args.config.string(), 0, "config must be a JSON object");
  }
  const std::unordered_set<std::string> allowed = {
      "locations",    "p",
      "mu",           "relative_risk",
      "outbreak_size", "baseline_weeks",
      "outbreak_weeks", "max_duration",
      "datasets",     "replicates",
      "alphas",       "methods",
      "pvalue",       "estimate_baselines",
      "seed"};
  for (const auto& item : config.items()) {
    if (!allowed.count(item.key())) {
      throw ParameterError("unknown config key '" + item.key() + "'");
    }
  }
  for (const char* required : {"p", "mu", "relative_risk"}) {
    if (!config.contains(required)) {
      throw ParameterError(std::string("config key '") + required + "' is required");
    }
  }

  const int locations = config_int(config, "locations", 100);
  const std::vector<double> p_values = config_doubles(config, "p");
  const std::vector<double> mu_values = config_doubles(config, "mu");
  const std::vector<double> risks = config_doubles(config, "relative_risk");
  std::vector<int> sizes;
  const bool any_outbreak =
      std::any_of(risks.begin(), risks.end(), [](double q) { return q > 1.0; });
  if (any_outbreak) {
    if (!config.contains("outbreak_size")) {
      throw ParameterError(
          "config key 'outbreak_size' is required when relative_risk exceeds 1");
    }
    sizes = config_ints(config, "outbreak_size");
  }

  std::uint64_t seed = 0;
  if (config.contains("seed")) {
    if (!config.at("seed").is_number_unsigned() &&
        !config.at("seed").is_number_integer()) {
      throw ParameterError("config key 'seed' must be an integer");
    }
    seed = config.at("seed").get<std::uint64_t>();
  }
  if (args.seed) seed = *args.seed;

  ExperimentConfig experiment;
  experiment.master_seed = seed;
  experiment.threads = args.threads;
  experiment.datasets_per_scenario = config_int(config, "datasets", 100);
  experiment.null_replicates = config_int(config, "replicates", 199);
  if (config.contains("alphas")) {
    experiment.alphas = config_doubles(config, "alphas");
  }
  if (config.contains("methods")) {
    experiment.methods.clear();
    const auto& methods = config.at("methods");
    if (!methods.is_array() || methods.empty()) {
      throw ParameterError("config key 'methods' must be a non-empty array");
    }
    for (const auto& m : methods) {
      if (!m.is_string()) throw ParameterError("methods must be strings");
      experiment.methods.push_back(parse_method(m.get<std::string>()));
    }
  }
  if (config.contains("pvalue")) {
    if (!config.at("pvalue").is_string()) {
      throw ParameterError("config key 'pvalue' must be a string");
    }
    experiment.pvalue_method =
        parse_pvalue_method(config.at("pvalue").get<std::string>());
  }
  if (config.contains("estimate_baselines")) {
    if (!config.at("estimate_baselines").is_boolean()) {
      throw ParameterError("config key 'estimate_baselines' must be a boolean");
    }
    experiment.estimate_baselines = config.at("estimate_baselines").get<bool>();
  }

  const int baseline_weeks = config_int(config, "baseline_weeks", 9);
  const int outbreak_weeks = config_int(config, "outbreak_weeks", 11);
  const int max_duration = config_int(config, "max_duration", 10);

  std::vector<Scenario> scenarios;
  for (double p : p_values) {
    for (double mu : mu_values) {
      for (double q : risks) {
        const std::vector<int> size_list = q > 1.0 ? sizes : std::vector<int>{0};
        for (int size : size_list) {
          Scenario sc = make_scenario(locations, p, mu, q, size, seed);
          sc.baseline_weeks = baseline_weeks;
          sc.outbreak_weeks = outbreak_weeks;
          sc.max_duration = max_duration;
          scenarios.push_back(std::move(sc));
        }
      }
    }
  }

  const ExperimentTable table = run_experiment(scenarios, experiment);
  write_experiment_table(args.out, table);
  std::cerr << "simulated " << scenarios.size() << " scenarios; wrote "
            << table.rows.size() << " rows to " << args.out.string() << '\n';
  return 0;
}

}  // namespace zipscan::cli
