#pragma once

#include <vector>

#include "zipscan/common.hpp"
#include "zipscan/zip.hpp"

namespace zipscan {

// Counts over locations and time.  Time is indexed backwards: t = 0 is the
// most recent period, t = periods()-1 the oldest.  Storage is location-major.
class CountGrid {
 public:
  CountGrid(int n_locations, int periods);

  int n_locations() const { return n_; }
  int periods() const { return t_; }

  int at(int loc, int t) const { return data_[index(loc, t)]; }
  void set(int loc, int t, int count);

  const int* row(int loc) const { return data_.data() + static_cast<size_t>(loc) * t_; }

  // The `depth` most recent periods ending `newest_offset` periods before the
  // newest one.  slice(0, d) keeps the d newest periods.
  CountGrid slice(int newest_offset, int depth) const;

  bool operator==(const CountGrid&) const = default;

 private:
  size_t index(int loc, int t) const;
  int n_;
  int t_;
  std::vector<int> data_;
};

// Expected baselines (p_it, mu_it) per cell, same indexing as CountGrid.
// Cells are validated on assignment.
class BaselineGrid {
 public:
  BaselineGrid(int n_locations, int periods);  // fills with p=0, mu=1
  static BaselineGrid constant(int n_locations, int periods, ZipParams cell);

  int n_locations() const { return n_; }
  int periods() const { return t_; }

  ZipParams at(int loc, int t) const {
    const size_t i = index(loc, t);
    return {p_[i], mu_[i]};
  }
  void set(int loc, int t, ZipParams cell);

  const double* p_row(int loc) const { return p_.data() + static_cast<size_t>(loc) * t_; }
  const double* mu_row(int loc) const { return mu_.data() + static_cast<size_t>(loc) * t_; }

  BaselineGrid slice(int newest_offset, int depth) const;

 private:
  size_t index(int loc, int t) const;
  int n_;
  int t_;
  std::vector<double> p_;
  std::vector<double> mu_;
};

// Throws DimensionError unless both grids cover the same locations and periods.
void check_aligned(const CountGrid& counts, const BaselineGrid& baselines);

}  // namespace zipscan
