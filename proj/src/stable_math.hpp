#pragma once

#include <cmath>
#include <limits>
#include <vector>

// Numerically stable pieces shared by the distribution and scan code.
namespace zipscan::detail {

// lgamma(n) for integer n >= 1, table-backed for the small values that
// dominate count data.
inline double lgamma_int(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(1024);
    t[0] = std::numeric_limits<double>::infinity();
    for (int i = 1; i < 1024; ++i) t[i] = std::lgamma(static_cast<double>(i));
    return t;
  }();
  if (n < static_cast<int>(table.size())) return table[n];
  return std::lgamma(static_cast<double>(n));
}

struct ZeroTerms {
  double log_pmf;  // log(p + (1-p) e^{-x})
  double delta;    // p / (p + (1-p) e^{-x})
};

// Evaluate both zero-count quantities from one exponential.  lp = log(p),
// l1p = log1p(-p), x = the Poisson mean.  Requires p > 0.  Branching on the
// sign of s keeps the exponential argument non-positive on both sides.
inline ZeroTerms zero_terms(double lp, double l1p, double x) {
  const double s = l1p - x - lp;
  if (s > 0.0) {
    const double e = std::exp(-s);
    return {lp + s + std::log1p(e), e / (1.0 + e)};
  }
  const double e = std::exp(s);
  // The posterior is strictly below 1; keep it that way when e rounds off.
  const double delta = std::min(1.0 / (1.0 + e), 0x1.fffffffffffffp-1);
  return {lp + std::log1p(e), delta};
}

// log(p + (1-p) e^{-x}) allowing p == 0.
inline double log_zero_mass(double p, double x) {
  if (p <= 0.0) return -x;
  return zero_terms(std::log(p), std::log1p(-p), x).log_pmf;
}

}  // namespace zipscan::detail
