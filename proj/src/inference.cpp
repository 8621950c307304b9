#include "zipscan/inference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

namespace zipscan {

namespace {
constexpr double kEulerGamma = 0.57721566490153286061;
constexpr std::uint32_t kStreamNullReplicate = 0x52u;
}  // namespace

double ReplicateSet::zero_fraction() const {
  if (values.empty()) return 0.0;
  const auto zeros = std::count(values.begin(), values.end(), 0.0);
  return static_cast<double>(zeros) / static_cast<double>(values.size());
}

CountGrid simulate_null_grid(const BaselineGrid& baselines, RngEngine& rng) {
  CountGrid grid(baselines.n_locations(), baselines.periods());
  for (int i = 0; i < baselines.n_locations(); ++i) {
    for (int t = 0; t < baselines.periods(); ++t) {
      grid.set(i, t, zip_sample(baselines.at(i, t), rng));
    }
  }
  return grid;
}

ReplicateSet run_replication(const BaselineGrid& baselines, const ZoneSet& zones,
                             const ScanOptions& scan_options, int replicates,
                             std::uint64_t master_seed, int threads) {
  if (replicates < 1) throw ParameterError("need at least one replicate");
  if (threads < 1) throw ParameterError("threads must be at least 1");

  ReplicateSet set;
  set.master_seed = master_seed;
  set.values.assign(replicates, 0.0);

  // Parallelism lives at the replicate level; each scan runs single-threaded
  // and each replicate draws from its own sub-stream, so the values are the
  // same for any thread count.
  ScanOptions inner = scan_options;
  inner.threads = 1;
  inner.top_k = 1;

  const int n_workers = std::min(threads, replicates);
  std::vector<std::exception_ptr> errors(n_workers);
  const auto work = [&](int worker) {
    try {
      for (int j = worker; j < replicates; j += n_workers) {
        RngEngine rng =
            make_stream(master_seed, {kStreamNullReplicate,
                                      static_cast<std::uint32_t>(j + 1)});
        const CountGrid grid = simulate_null_grid(baselines, rng);
        set.values[j] = scan(grid, baselines, zones, inner).lambda_star;
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };

  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return set;
}

namespace {

PValueReport rank_pvalue(double observed, std::span<const double> values,
                         PValueMethod method) {
  if (!std::isfinite(observed)) throw ParameterError("observed value must be finite");
  if (values.empty()) throw ParameterError("need at least one reference value");
  long long above = 0;
  for (double v : values) {
    if (v > observed) ++above;
  }
  PValueReport report;
  report.observed = observed;
  report.method = method;
  report.sample_size = static_cast<int>(values.size());
  report.p_value = static_cast<double>(1 + above) /
                   static_cast<double>(1 + values.size());
  return report;
}

}  // namespace

PValueReport monte_carlo_pvalue(double observed, const ReplicateSet& replicates) {
  return rank_pvalue(observed, replicates.values, PValueMethod::kMonteCarlo);
}

GumbelParams gumbel_fit(const ReplicateSet& replicates) {
  const auto& v = replicates.values;
  if (v.size() < 2) throw ParameterError("Gumbel fit needs at least two values");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  if (!(sd > 0.0)) {
    throw DegenerateSampleError("replicate values have zero variance");
  }
  GumbelParams params;
  params.scale = sd * std::sqrt(6.0) / std::numbers::pi;
  params.location = mean - kEulerGamma * params.scale;
  return params;
}

PValueReport gumbel_pvalue(double observed, const GumbelParams& params) {
  if (!std::isfinite(observed)) throw ParameterError("observed value must be finite");
  if (!std::isfinite(params.location) || !std::isfinite(params.scale) ||
      params.scale <= 0.0) {
    throw ParameterError("Gumbel scale must be finite and positive");
  }
  const double z = (observed - params.location) / params.scale;
  // P(X > x) = 1 - exp(-exp(-z)); expm1 keeps the small-tail precision.
  double tail = -std::expm1(-std::exp(-z));
  tail = std::min(1.0, std::max(1e-300, tail));
  PValueReport report;
  report.observed = observed;
  report.method = PValueMethod::kGumbel;
  report.p_value = tail;
  report.sample_size = 0;
  return report;
}

PValueReport empirical_pvalue(double observed, std::span<const double> history) {
  return rank_pvalue(observed, history, PValueMethod::kEmpirical);
}

}  // namespace zipscan
