#pragma once

#include <span>
#include <vector>

#include "zipscan/grid.hpp"
#include "zipscan/zip.hpp"
#include "zipscan/zones.hpp"

namespace zipscan {

enum class Statistic {
  kEbZip,      // expectation-based zero-inflated Poisson
  kEbPoisson,  // expectation-based Poisson comparator
};

// One space-time window: a zone index into a ZoneSet plus the number of most
// recent periods it spans (duration d covers t = 0..d-1).
struct Window {
  int zone_index = -1;
  int duration = 0;
  bool operator==(const Window&) const = default;
};

// One cell of a window: observed count plus its baseline parameters.
struct WindowCell {
  int y = 0;
  double p = 0.0;
  double mu = 1.0;
};

struct EmOptions {
  double tol = 1e-6;
  int max_iter = 1000;
  double q_init = 1.0;
};

struct EmEstimate {
  double q_hat = 1.0;
  std::vector<double> deltas;  // per-cell structural-zero posterior at q_hat
  int iterations = 0;
  bool converged = true;
};

// EM estimate of the window relative risk, constrained to q >= 1.  Counts
// enter only through sums, zeros through their (p, mu) groups.  Convergence:
// |l_k - l_{k-1}| < tol * max(1, |l_{k-1}|) on the window log-likelihood.
// `loglik_trace`, when given, receives the log-likelihood at q_init and after
// each iteration.
EmEstimate zip_em_qhat(std::span<const WindowCell> cells,
                       const EmOptions& options = {},
                       std::vector<double>* loglik_trace = nullptr);

// Log-likelihood ratio of risk q versus risk 1 over the window cells.  Not
// clamped; negative when q fits worse than the baseline.
double zip_window_lambda(std::span<const WindowCell> cells, double q);

struct WindowScore {
  Window window;
  double q_hat = 1.0;
  double lambda = 0.0;
  int em_iterations = 0;
  bool converged = true;
  bool operator==(const WindowScore&) const = default;
};

// Closed-form expectation-based Poisson score for one window.
WindowScore poisson_window_score(std::span<const WindowCell> cells);

struct ScanOptions {
  int max_duration = 1;
  Statistic statistic = Statistic::kEbZip;
  int top_k = 5;
  double em_tol = 1e-6;
  int em_max_iter = 1000;
  // Seed each duration's EM from the previous duration's estimate.  Purely an
  // accelerator; disable to start every window at q = 1.
  bool warm_start = true;
  int threads = 1;
};

struct ScanResult {
  Statistic statistic = Statistic::kEbZip;
  double lambda_star = 0.0;
  std::vector<WindowScore> ranked;  // best first; lambda desc, duration asc, zone asc
  long long windows_evaluated = 0;
  int non_converged_windows = 0;

  const WindowScore& mlc() const { return ranked.front(); }
};

// Score every (zone, duration) window and keep the top_k best.  Results do not
// depend on `threads`.
ScanResult scan(const CountGrid& counts, const BaselineGrid& baselines,
                const ZoneSet& zones, const ScanOptions& options);

}  // namespace zipscan
