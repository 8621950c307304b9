#include "zipscan/scan.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "stable_math.hpp"

namespace zipscan {

namespace {

// Poisson part of the log-likelihood ratio.  Both statistics route through
// this one expression so a window with no zero-inflation mass scores exactly
// the same under either.
inline double poisson_llr(double sum_y, double sum_mu, double q) {
  return sum_y * std::log(q) - (q - 1.0) * sum_mu;
}

struct ZeroGroup {
  double p;
  double mu;
  double lp;            // log(p)
  double l1p;           // log1p(-p)
  double null_log_pmf;  // log P(Y=0) at risk 1
  long long count;
};

// Sufficient statistics of one window.  Zero-count cells with p > 0 are
// coalesced by exact (p, mu); all other cells enter only through sums, so the
// per-iteration EM cost scales with the number of distinct baselines, not the
// number of cells.
struct WindowState {
  double sum_y = 0.0;  // integer-valued; exact as a double to 2^53
  double sum_mu = 0.0;
  double sum_mu_grouped = 0.0;
  double const_pos = 0.0;  // q-free log-likelihood terms of positive cells
  std::vector<ZeroGroup> groups;

  void reset() {
    sum_y = sum_mu = sum_mu_grouped = const_pos = 0.0;
    groups.clear();
  }

  // Poisson mass outside the zero groups; bitwise equal to sum_mu when no
  // groups exist.
  double ungrouped_mu() const { return sum_mu - sum_mu_grouped; }

  void add_zero(double p, double mu) {
    sum_mu_grouped += mu;
    for (auto& g : groups) {
      if (g.p == p && g.mu == mu) {
        ++g.count;
        return;
      }
    }
    const double lp = std::log(p);
    const double l1p = std::log1p(-p);
    groups.push_back({p, mu, lp, l1p, detail::zero_terms(lp, l1p, mu).log_pmf, 1});
  }

  void add_cell(int y, double p, double mu) {
    sum_y += y;
    sum_mu += mu;
    if (y == 0) {
      if (p > 0.0) add_zero(p, mu);
    } else {
      const_pos += std::log1p(-p) + y * std::log(mu) - detail::lgamma_int(y + 1);
    }
  }
};

double window_loglik(const WindowState& w, double q) {
  double zero_part = 0.0;
  for (const auto& g : w.groups) {
    zero_part +=
        static_cast<double>(g.count) * detail::zero_terms(g.lp, g.l1p, q * g.mu).log_pmf;
  }
  return w.const_pos + w.sum_y * std::log(q) - q * w.ungrouped_mu() + zero_part;
}

// One E-step at q_cur followed by the closed-form M-step.
double em_step(const WindowState& w, double q_cur) {
  double grouped_delta_mass = 0.0;
  for (const auto& g : w.groups) {
    grouped_delta_mass += static_cast<double>(g.count) * g.mu *
                          detail::zero_terms(g.lp, g.l1p, q_cur * g.mu).delta;
  }
  return std::max(1.0, w.sum_y / (w.sum_mu - grouped_delta_mass));
}

double window_lambda(const WindowState& w, double q) {
  if (q == 1.0) return 0.0;
  double lam = poisson_llr(w.sum_y, w.ungrouped_mu(), q);
  for (const auto& g : w.groups) {
    lam += static_cast<double>(g.count) *
           (detail::zero_terms(g.lp, g.l1p, q * g.mu).log_pmf - g.null_log_pmf);
  }
  return lam;
}

struct EmCore {
  double q_hat;
  double lambda;
  int iterations;
  bool converged;
};

EmCore run_em(const WindowState& w, double q_init, double tol, int max_iter,
              std::vector<double>* trace) {
  if (w.sum_y == 0.0) {
    // No events anywhere: the constrained optimum is q = 1 without iterating.
    if (trace) trace->push_back(window_loglik(w, 1.0));
    return {1.0, 0.0, 0, true};
  }
  double q = q_init;
  double ll = window_loglik(w, q);
  if (trace) trace->push_back(ll);
  for (int it = 1; it <= max_iter; ++it) {
    const double q_new = em_step(w, q);
    const double ll_new = window_loglik(w, q_new);
    if (trace) trace->push_back(ll_new);
    const bool converged = std::fabs(ll_new - ll) < tol * std::max(1.0, std::fabs(ll));
    q = q_new;
    ll = ll_new;
    if (converged) {
      double lam = window_lambda(w, q);
      if (!(lam > 0.0)) lam = 0.0;
      return {q, lam, it, true};
    }
  }
  double lam = window_lambda(w, q);
  if (!(lam > 0.0)) lam = 0.0;
  return {q, lam, max_iter, false};
}

void check_window_cells(std::span<const WindowCell> cells) {
  if (cells.empty()) throw ParameterError("window must contain at least one cell");
  for (const auto& c : cells) {
    check_zip_params({c.p, c.mu});
    if (c.y < 0) throw ParameterError("counts must be non-negative");
  }
}

}  // namespace

EmEstimate zip_em_qhat(std::span<const WindowCell> cells, const EmOptions& options,
                       std::vector<double>* loglik_trace) {
  check_window_cells(cells);
  if (options.tol <= 0.0 || options.max_iter < 1) {
    throw ParameterError("tol must be positive and max_iter at least 1");
  }
  if (!std::isfinite(options.q_init) || options.q_init < 1.0) {
    throw ParameterError("q_init must be finite and at least 1");
  }
  WindowState state;
  for (const auto& c : cells) state.add_cell(c.y, c.p, c.mu);
  const EmCore core =
      run_em(state, options.q_init, options.tol, options.max_iter, loglik_trace);
  EmEstimate est;
  est.q_hat = core.q_hat;
  est.iterations = core.iterations;
  est.converged = core.converged;
  est.deltas.reserve(cells.size());
  for (const auto& c : cells) {
    est.deltas.push_back(
        c.y == 0 ? structural_zero_posterior({c.p, c.mu}, core.q_hat) : 0.0);
  }
  return est;
}

double zip_window_lambda(std::span<const WindowCell> cells, double q) {
  check_window_cells(cells);
  if (!std::isfinite(q) || q <= 0.0) {
    throw ParameterError("relative risk must be finite and positive");
  }
  double lam = 0.0;
  for (const auto& c : cells) {
    lam += zip_log_pmf(c.y, {c.p, q * c.mu}) - zip_log_pmf(c.y, {c.p, c.mu});
  }
  return lam;
}

WindowScore poisson_window_score(std::span<const WindowCell> cells) {
  check_window_cells(cells);
  double sum_y = 0.0;
  double sum_mu = 0.0;
  for (const auto& c : cells) {
    sum_y += c.y;
    sum_mu += c.mu;
  }
  WindowScore score;
  score.q_hat = std::max(1.0, sum_y / sum_mu);
  score.lambda = score.q_hat == 1.0 ? 0.0 : poisson_llr(sum_y, sum_mu, score.q_hat);
  if (!(score.lambda > 0.0)) score.lambda = 0.0;
  return score;
}

namespace {

// Strict total order on scores: better lambda first, then shorter duration,
// then the zone that comes first in the canonical zone order.
bool score_before(const WindowScore& a, const WindowScore& b) {
  if (a.lambda != b.lambda) return a.lambda > b.lambda;
  if (a.window.duration != b.window.duration) {
    return a.window.duration < b.window.duration;
  }
  return a.window.zone_index < b.window.zone_index;
}

void topk_insert(std::vector<WindowScore>& best, const WindowScore& s, int k) {
  if (static_cast<int>(best.size()) == k && !score_before(s, best.back())) return;
  best.insert(std::upper_bound(best.begin(), best.end(), s, score_before), s);
  if (static_cast<int>(best.size()) > k) best.pop_back();
}

struct ZoneWorkspace {
  std::vector<long long> sum_y_at;
  std::vector<double> sum_mu_at;
  std::vector<double> const_pos_at;
  std::vector<std::vector<std::pair<double, double>>> zeros_at;
  WindowState state;
};

void score_zone(int zone_index, const Zone& zone, const CountGrid& counts,
                const BaselineGrid& baselines, const ScanOptions& opts,
                ZoneWorkspace& ws, std::vector<WindowScore>& best,
                int& non_converged) {
  const int depth = opts.max_duration;
  const bool zip = opts.statistic == Statistic::kEbZip;
  ws.sum_y_at.assign(depth, 0);
  ws.sum_mu_at.assign(depth, 0.0);
  ws.const_pos_at.assign(depth, 0.0);
  if (zip) {
    ws.zeros_at.resize(depth);
    for (auto& z : ws.zeros_at) z.clear();
  }

  for (int member : zone.members) {
    const int* yrow = counts.row(member);
    const double* prow = baselines.p_row(member);
    const double* murow = baselines.mu_row(member);
    for (int t = 0; t < depth; ++t) {
      const int y = yrow[t];
      const double mu = murow[t];
      ws.sum_y_at[t] += y;
      ws.sum_mu_at[t] += mu;
      if (!zip) continue;
      const double p = prow[t];
      if (y == 0) {
        if (p > 0.0) ws.zeros_at[t].emplace_back(p, mu);
      } else {
        ws.const_pos_at[t] +=
            std::log1p(-p) + y * std::log(mu) - detail::lgamma_int(y + 1);
      }
    }
  }

  ws.state.reset();
  double q_warm = 1.0;
  for (int d = 1; d <= depth; ++d) {
    const int t = d - 1;
    ws.state.sum_y += static_cast<double>(ws.sum_y_at[t]);
    ws.state.sum_mu += ws.sum_mu_at[t];
    ws.state.const_pos += ws.const_pos_at[t];
    WindowScore s;
    s.window = {zone_index, d};
    if (zip) {
      for (const auto& [p, mu] : ws.zeros_at[t]) ws.state.add_zero(p, mu);
      const EmCore core = run_em(ws.state, opts.warm_start ? q_warm : 1.0,
                                 opts.em_tol, opts.em_max_iter, nullptr);
      q_warm = core.q_hat;
      s.q_hat = core.q_hat;
      s.lambda = core.lambda;
      s.em_iterations = core.iterations;
      s.converged = core.converged;
      if (!core.converged) ++non_converged;
    } else {
      s.q_hat = std::max(1.0, ws.state.sum_y / ws.state.sum_mu);
      s.lambda =
          s.q_hat == 1.0 ? 0.0 : poisson_llr(ws.state.sum_y, ws.state.sum_mu, s.q_hat);
      if (!(s.lambda > 0.0)) s.lambda = 0.0;
    }
    topk_insert(best, s, opts.top_k);
  }
}

}  // namespace

ScanResult scan(const CountGrid& counts, const BaselineGrid& baselines,
                const ZoneSet& zones, const ScanOptions& options) {
  check_aligned(counts, baselines);
  if (zones.zones.empty()) throw ParameterError("zone set must be non-empty");
  for (const auto& z : zones.zones) {
    if (z.members.empty()) throw ParameterError("zones must be non-empty");
    for (int m : z.members) {
      if (m < 0 || m >= counts.n_locations()) {
        throw DimensionError("zone member " + std::to_string(m) +
                             " outside grid of " +
                             std::to_string(counts.n_locations()) + " locations");
      }
    }
  }
  if (options.max_duration < 1 || options.max_duration > counts.periods()) {
    throw ParameterError("max_duration must lie in [1, periods]");
  }
  if (options.top_k < 1) throw ParameterError("top_k must be at least 1");
  if (options.em_tol <= 0.0 || options.em_max_iter < 1) {
    throw ParameterError("tol must be positive and max_iter at least 1");
  }
  if (options.threads < 1) throw ParameterError("threads must be at least 1");

  const int n_zones = static_cast<int>(zones.zones.size());
  const int n_workers = std::min(options.threads, n_zones);
  std::vector<std::vector<WindowScore>> best_per_worker(n_workers);
  std::vector<int> non_converged_per_worker(n_workers, 0);
  std::vector<std::exception_ptr> errors(n_workers);

  const auto work = [&](int worker) {
    try {
      ZoneWorkspace ws;
      auto& best = best_per_worker[worker];
      best.reserve(options.top_k + 1);
      const int chunk = (n_zones + n_workers - 1) / n_workers;
      const int lo = worker * chunk;
      const int hi = std::min(n_zones, lo + chunk);
      for (int z = lo; z < hi; ++z) {
        score_zone(z, zones.zones[z], counts, baselines, options, ws, best,
                   non_converged_per_worker[worker]);
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

  ScanResult result;
  result.statistic = options.statistic;
  result.windows_evaluated =
      static_cast<long long>(n_zones) * options.max_duration;
  for (int w = 0; w < n_workers; ++w) {
    result.non_converged_windows += non_converged_per_worker[w];
    result.ranked.insert(result.ranked.end(), best_per_worker[w].begin(),
                         best_per_worker[w].end());
  }
  std::sort(result.ranked.begin(), result.ranked.end(), score_before);
  if (static_cast<int>(result.ranked.size()) > options.top_k) {
    result.ranked.resize(options.top_k);
  }
  result.lambda_star = result.ranked.front().lambda;
  return result;
}

}  // namespace zipscan
