#include "zipscan/zip.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stable_math.hpp"

namespace zipscan {

bool zip_params_valid(const ZipParams& params) {
  return std::isfinite(params.p) && std::isfinite(params.mu) &&
         params.p >= 0.0 && params.p < 1.0 - kPUpperMargin &&
         params.mu > kMuLowerBound;
}

void check_zip_params(const ZipParams& params) {
  if (!zip_params_valid(params)) {
    throw ParameterError("zip parameters out of range: p=" + std::to_string(params.p) +
                         ", mu=" + std::to_string(params.mu));
  }
}

double zip_log_pmf(int y, const ZipParams& params) {
  check_zip_params(params);
  if (y < 0) throw ParameterError("count must be non-negative");
  if (y == 0) return detail::log_zero_mass(params.p, params.mu);
  return std::log1p(-params.p) + y * std::log(params.mu) - params.mu -
         detail::lgamma_int(y + 1);
}

ZipMoments zip_moments(const ZipParams& params) {
  check_zip_params(params);
  const double scale = (1.0 - params.p) * params.mu;
  return {scale, scale * (1.0 + params.p * params.mu)};
}

int zip_sample(const ZipParams& params, RngEngine& rng) {
  check_zip_params(params);
  if (params.p > 0.0) {
    std::bernoulli_distribution structural(params.p);
    if (structural(rng)) return 0;
  }
  std::poisson_distribution<int> sampled(params.mu);
  return sampled(rng);
}

double structural_zero_posterior(const ZipParams& params, double q) {
  check_zip_params(params);
  if (!std::isfinite(q) || q <= 0.0) {
    throw ParameterError("relative risk must be finite and positive");
  }
  if (params.p == 0.0) return 0.0;
  return detail::zero_terms(std::log(params.p), std::log1p(-params.p),
                            q * params.mu)
      .delta;
}

FitNonConvergence::FitNonConvergence(ZipParams last, int iterations_)
    : std::runtime_error("zip EM fit did not converge after " +
                         std::to_string(iterations_) + " iterations"),
      last_iterate(last),
      iterations(iterations_) {}

double zip_series_log_likelihood(const HistoricalSeries& series,
                                 const ZipParams& params) {
  if (series.counts.empty()) throw ParameterError("series must be non-empty");
  double ll = 0.0;
  for (int y : series.counts) ll += zip_log_pmf(y, params);
  return ll;
}

ZipFit zip_fit_em(const HistoricalSeries& series, double tol, int max_iter,
                  std::vector<double>* loglik_trace) {
  const auto& counts = series.counts;
  if (counts.size() < 2) {
    throw ParameterError("series needs at least two observations");
  }
  if (tol <= 0.0 || max_iter < 1) {
    throw ParameterError("tol must be positive and max_iter at least 1");
  }
  long long n_zero = 0;
  long long sum = 0;
  double lgamma_pos = 0.0;
  for (int y : counts) {
    if (y < 0) throw ParameterError("counts must be non-negative");
    if (y == 0) {
      ++n_zero;
    } else {
      sum += y;
      lgamma_pos += detail::lgamma_int(y + 1);
    }
  }
  if (sum == 0) {
    throw DegenerateSampleError(
        "all-zero series: p and mu are not jointly identifiable");
  }
  const auto n = static_cast<long long>(counts.size());
  const long long n_pos = n - n_zero;
  const double mean_pos = static_cast<double>(sum) / static_cast<double>(n_pos);
  const double zero_frac = static_cast<double>(n_zero) / static_cast<double>(n);

  const auto loglik = [&](double p, double mu) {
    return static_cast<double>(n_zero) * detail::log_zero_mass(p, mu) +
           static_cast<double>(n_pos) * std::log1p(-p) +
           static_cast<double>(sum) * std::log(mu) -
           static_cast<double>(n_pos) * mu - lgamma_pos;
  };

  // Moment-style start: zeros in excess of what Poisson(mean of positives)
  // would produce.  mean_pos >= 1, so the denominator stays away from zero.
  const double excess = std::exp(-mean_pos);
  double p = std::clamp((zero_frac - excess) / (1.0 - excess), 1e-4, 1.0 - 1e-4);
  double mu = mean_pos;
  double ll = loglik(p, mu);
  if (loglik_trace) loglik_trace->push_back(ll);

  for (int it = 1; it <= max_iter; ++it) {
    // E-step: all zero observations share one structural posterior.
    const double delta =
        p > 0.0 ? detail::zero_terms(std::log(p), std::log1p(-p), mu).delta : 0.0;
    const double weight = static_cast<double>(n_zero) * delta;
    double p_new = weight / static_cast<double>(n);
    double mu_new = static_cast<double>(sum) / (static_cast<double>(n) - weight);
    p_new = std::min(p_new, 1.0 - 2.0 * kPUpperMargin);
    mu_new = std::max(mu_new, 2.0 * kMuLowerBound);
    const double ll_new = loglik(p_new, mu_new);
    if (loglik_trace) loglik_trace->push_back(ll_new);
    const bool converged = std::fabs(ll_new - ll) < tol * std::max(1.0, std::fabs(ll));
    p = p_new;
    mu = mu_new;
    ll = ll_new;
    if (converged) return {{p, mu}, it, ll};
  }
  throw FitNonConvergence({p, mu}, max_iter);
}

}  // namespace zipscan
