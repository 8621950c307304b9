#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zipscan/grid.hpp"
#include "zipscan/scan.hpp"

namespace zipscan {

enum class PValueMethod {
  kMonteCarlo,  // rank among fresh null replicates
  kGumbel,      // tail of a Gumbel fitted to null replicates
  kEmpirical,   // rank among stored historical values
};

// Scan statistics of null replicates, in replicate order.
struct ReplicateSet {
  std::vector<double> values;
  std::uint64_t master_seed = 0;

  double zero_fraction() const;
};

struct PValueReport {
  double observed = 0.0;
  PValueMethod method = PValueMethod::kMonteCarlo;
  double p_value = 1.0;
  int sample_size = 0;  // replicates or stored values backing the estimate
};

// One dataset drawn from the baseline model (no outbreak), cells sampled in
// (location, time) order.
CountGrid simulate_null_grid(const BaselineGrid& baselines, RngEngine& rng);

// Scan statistics of `replicates` null datasets.  Replicate j draws from
// sub-stream (master_seed, j), so the set does not depend on threads.
ReplicateSet run_replication(const BaselineGrid& baselines, const ZoneSet& zones,
                             const ScanOptions& scan_options, int replicates,
                             std::uint64_t master_seed, int threads = 1);

// P = (1 + #{replicates strictly above observed}) / (1 + R).
PValueReport monte_carlo_pvalue(double observed, const ReplicateSet& replicates);

struct GumbelParams {
  double location = 0.0;
  double scale = 1.0;
};

// Method-of-moments fit: scale = sd * sqrt(6)/pi (sample sd, n-1), location =
// mean - Euler-gamma * scale.  Needs >= 2 values and positive variance.
GumbelParams gumbel_fit(const ReplicateSet& replicates);

// Upper tail P(X > observed) of the fitted Gumbel, clamped to (1e-300, 1].
PValueReport gumbel_pvalue(double observed, const GumbelParams& params);

// Monte Carlo arithmetic applied to stored values from past analyses.
PValueReport empirical_pvalue(double observed, std::span<const double> history);

}  // namespace zipscan
