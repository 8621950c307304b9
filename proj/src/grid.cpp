#include "zipscan/grid.hpp"

#include <string>

namespace zipscan {

namespace {
void check_shape(int n, int t) {
  if (n < 1 || t < 1) {
    throw DimensionError("grid needs at least one location and one period");
  }
}
}  // namespace

CountGrid::CountGrid(int n_locations, int periods) : n_(n_locations), t_(periods) {
  check_shape(n_, t_);
  data_.assign(static_cast<size_t>(n_) * t_, 0);
}

size_t CountGrid::index(int loc, int t) const {
  if (loc < 0 || loc >= n_ || t < 0 || t >= t_) {
    throw DimensionError("cell (" + std::to_string(loc) + ", " + std::to_string(t) +
                         ") outside grid of " + std::to_string(n_) + " locations x " +
                         std::to_string(t_) + " periods");
  }
  return static_cast<size_t>(loc) * t_ + t;
}

void CountGrid::set(int loc, int t, int count) {
  if (count < 0) throw ParameterError("counts must be non-negative");
  data_[index(loc, t)] = count;
}

CountGrid CountGrid::slice(int newest_offset, int depth) const {
  if (newest_offset < 0 || depth < 1 || newest_offset + depth > t_) {
    throw DimensionError("slice outside grid: offset " + std::to_string(newest_offset) +
                         ", depth " + std::to_string(depth) + ", periods " +
                         std::to_string(t_));
  }
  CountGrid out(n_, depth);
  for (int i = 0; i < n_; ++i) {
    for (int t = 0; t < depth; ++t) {
      out.data_[static_cast<size_t>(i) * depth + t] = at(i, newest_offset + t);
    }
  }
  return out;
}

BaselineGrid::BaselineGrid(int n_locations, int periods)
    : n_(n_locations), t_(periods) {
  check_shape(n_, t_);
  p_.assign(static_cast<size_t>(n_) * t_, 0.0);
  mu_.assign(static_cast<size_t>(n_) * t_, 1.0);
}

BaselineGrid BaselineGrid::constant(int n_locations, int periods, ZipParams cell) {
  check_zip_params(cell);
  BaselineGrid out(n_locations, periods);
  std::fill(out.p_.begin(), out.p_.end(), cell.p);
  std::fill(out.mu_.begin(), out.mu_.end(), cell.mu);
  return out;
}

size_t BaselineGrid::index(int loc, int t) const {
  if (loc < 0 || loc >= n_ || t < 0 || t >= t_) {
    throw DimensionError("cell (" + std::to_string(loc) + ", " + std::to_string(t) +
                         ") outside grid of " + std::to_string(n_) + " locations x " +
                         std::to_string(t_) + " periods");
  }
  return static_cast<size_t>(loc) * t_ + t;
}

void BaselineGrid::set(int loc, int t, ZipParams cell) {
  check_zip_params(cell);
  const size_t i = index(loc, t);
  p_[i] = cell.p;
  mu_[i] = cell.mu;
}

BaselineGrid BaselineGrid::slice(int newest_offset, int depth) const {
  if (newest_offset < 0 || depth < 1 || newest_offset + depth > t_) {
    throw DimensionError("slice outside grid: offset " + std::to_string(newest_offset) +
                         ", depth " + std::to_string(depth) + ", periods " +
                         std::to_string(t_));
  }
  BaselineGrid out(n_, depth);
  for (int i = 0; i < n_; ++i) {
    for (int t = 0; t < depth; ++t) {
      const size_t src = static_cast<size_t>(i) * t_ + newest_offset + t;
      const size_t dst = static_cast<size_t>(i) * depth + t;
      out.p_[dst] = p_[src];
      out.mu_[dst] = mu_[src];
    }
  }
  return out;
}

void check_aligned(const CountGrid& counts, const BaselineGrid& baselines) {
  if (counts.n_locations() != baselines.n_locations() ||
      counts.periods() != baselines.periods()) {
    throw DimensionError(
        "counts cover " + std::to_string(counts.n_locations()) + " locations x " +
        std::to_string(counts.periods()) + " periods but baselines cover " +
        std::to_string(baselines.n_locations()) + " x " +
        std::to_string(baselines.periods()));
  }
}

}  // namespace zipscan
