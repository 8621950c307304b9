#pragma once

#include <vector>

#include "zipscan/common.hpp"

namespace zipscan {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Symmetric pairwise distances with zero diagonal and positive off-diagonal
// entries.  Locations are identified by index 0..size()-1.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(int n);
  static DistanceMatrix from_points(const std::vector<Point>& points);

  int size() const { return n_; }
  double at(int i, int j) const { return d_[index(i, j)]; }
  void set(int i, int j, double distance);  // sets both (i,j) and (j,i)
  void validate() const;                    // throws ParameterError on bad entries

 private:
  size_t index(int i, int j) const;
  int n_;
  std::vector<double> d_;
};

// A candidate cluster: a non-empty set of location indices, kept sorted and
// duplicate-free.
struct Zone {
  std::vector<int> members;
  bool operator==(const Zone&) const = default;
};

// Canonical order: smaller zones first, ties broken lexicographically.
bool zone_less(const Zone& a, const Zone& b);

// Zones in canonical order with no duplicates.
struct ZoneSet {
  std::vector<Zone> zones;
};

// Undirected graph over locations: sorted neighbor lists, symmetric, no
// self-loops.
struct AdjacencyRelation {
  int n = 0;
  std::vector<std::vector<int>> neighbors;
};

// Largest k such that a (k+1)-location zone covers at most half the map.
int max_k_for_half(int n_locations);

// The k nearest neighbors of `center` (center excluded), ordered by distance
// with ties broken by smaller index.
std::vector<int> nearest_neighbors(const DistanceMatrix& dist, int center, int k);

// Every "center plus its j nearest neighbors" set for j = 0..k_max, over all
// centers, deduplicated.
ZoneSet knn_zones(const DistanceMatrix& dist, int k_max);

// i ~ j iff i is among j's k nearest neighbors or vice versa.
AdjacencyRelation adjacency_from_knn(const DistanceMatrix& dist, int k);

// All connected subsets of size <= max_size drawn from each center's pool of
// itself plus its max_size-1 nearest neighbors, deduplicated.
ZoneSet flex_zones(const DistanceMatrix& dist, const AdjacencyRelation& adjacency,
                   int max_size);

}  // namespace zipscan
