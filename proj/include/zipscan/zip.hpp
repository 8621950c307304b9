#pragma once

#include <vector>

#include "zipscan/common.hpp"

namespace zipscan {

// Zero-inflated Poisson: a count is a structural zero with probability p,
// otherwise Poisson(mu).
struct ZipParams {
  double p = 0.0;
  double mu = 1.0;
};

// Valid domain: p in [0, 1 - kPUpperMargin), mu in (kMuLowerBound, inf).
// The open upper bound on p keeps log(1 - p) finite; the lower bound on mu
// keeps log(mu) and the E-step ratios well conditioned.
inline constexpr double kMuLowerBound = 1e-12;
inline constexpr double kPUpperMargin = 1e-12;

bool zip_params_valid(const ZipParams& params);
void check_zip_params(const ZipParams& params);  // throws ParameterError

double zip_log_pmf(int y, const ZipParams& params);

struct ZipMoments {
  double mean;
  double variance;
};
ZipMoments zip_moments(const ZipParams& params);

int zip_sample(const ZipParams& params, RngEngine& rng);

// Probability that an observed zero is structural rather than sampled, when
// the Poisson mean is inflated by relative risk q: p / (p + (1-p) e^{-q mu}).
double structural_zero_posterior(const ZipParams& params, double q);

// A historical series of counts from one process with constant parameters.
struct HistoricalSeries {
  std::vector<int> counts;
};

struct ZipFit {
  ZipParams params;
  int iterations;
  double log_likelihood;
};

// Raised when the EM fit runs out of iterations; carries the last iterate so
// callers can inspect how far it got.
class FitNonConvergence : public std::runtime_error {
 public:
  FitNonConvergence(ZipParams last, int iterations);
  ZipParams last_iterate;
  int iterations;
};

double zip_series_log_likelihood(const HistoricalSeries& series,
                                 const ZipParams& params);

// EM fit of (p, mu) from a series.  Requires at least two observations and at
// least one positive count.  Convergence: |l_k - l_{k-1}| < tol*max(1, |l_{k-1}|).
// If `loglik_trace` is given it receives the log-likelihood at the start and
// after each iteration.
ZipFit zip_fit_em(const HistoricalSeries& series, double tol = 1e-6,
                  int max_iter = 1000, std::vector<double>* loglik_trace = nullptr);

}  // namespace zipscan
