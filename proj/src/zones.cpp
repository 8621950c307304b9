#include "zipscan/zones.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace zipscan {

DistanceMatrix::DistanceMatrix(int n) : n_(n) {
  if (n < 1) throw DimensionError("distance matrix needs at least one location");
  d_.assign(static_cast<size_t>(n_) * n_, 0.0);
}

DistanceMatrix DistanceMatrix::from_points(const std::vector<Point>& points) {
  DistanceMatrix out(static_cast<int>(points.size()));
  for (int i = 0; i < out.n_; ++i) {
    for (int j = i + 1; j < out.n_; ++j) {
      out.set(i, j, std::hypot(points[i].x - points[j].x, points[i].y - points[j].y));
    }
  }
  return out;
}

size_t DistanceMatrix::index(int i, int j) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_) {
    throw DimensionError("location index outside matrix of size " + std::to_string(n_));
  }
  return static_cast<size_t>(i) * n_ + j;
}

void DistanceMatrix::set(int i, int j, double distance) {
  if (i == j) throw ParameterError("diagonal distances are fixed at zero");
  if (!std::isfinite(distance) || distance <= 0.0) {
    throw ParameterError("off-diagonal distances must be finite and positive");
  }
  d_[index(i, j)] = distance;
  d_[index(j, i)] = distance;
}

void DistanceMatrix::validate() const {
  for (int i = 0; i < n_; ++i) {
    if (d_[index(i, i)] != 0.0) throw ParameterError("diagonal must be zero");
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      const double v = d_[index(i, j)];
      if (!std::isfinite(v) || v <= 0.0) {
        throw ParameterError("distance between locations " + std::to_string(i) +
                             " and " + std::to_string(j) +
                             " must be finite and positive");
      }
      if (v != d_[index(j, i)]) {
        throw ParameterError("distances between locations " + std::to_string(i) +
                             " and " + std::to_string(j) + " are asymmetric");
      }
    }
  }
}

bool zone_less(const Zone& a, const Zone& b) {
  if (a.members.size() != b.members.size()) {
    return a.members.size() < b.members.size();
  }
  return a.members < b.members;
}

int max_k_for_half(int n_locations) {
  if (n_locations < 2) throw ParameterError("need at least two locations");
  return n_locations / 2 - 1;
}

std::vector<int> nearest_neighbors(const DistanceMatrix& dist, int center, int k) {
  const int n = dist.size();
  if (center < 0 || center >= n) throw DimensionError("center index out of range");
  if (k < 0 || k > n - 1) {
    throw ParameterError("neighbor count must lie in [0, n-1]");
  }
  std::vector<int> order;
  order.reserve(n - 1);
  for (int j = 0; j < n; ++j) {
    if (j != center) order.push_back(j);
  }
  // Distance ties resolve toward the smaller index, making zone membership
  // independent of input order.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = dist.at(center, a);
    const double db = dist.at(center, b);
    if (da != db) return da < db;
    return a < b;
  });
  order.resize(k);
  return order;
}

namespace {

void canonicalize(std::vector<Zone>& zones) {
  for (auto& z : zones) std::sort(z.members.begin(), z.members.end());
  std::sort(zones.begin(), zones.end(), zone_less);
  zones.erase(std::unique(zones.begin(), zones.end()), zones.end());
}

}  // namespace

ZoneSet knn_zones(const DistanceMatrix& dist, int k_max) {
  const int n = dist.size();
  if (k_max < 0 || k_max + 1 > n) {
    throw ParameterError("k_max must lie in [0, n-1]");
  }
  std::vector<Zone> zones;
  zones.reserve(static_cast<size_t>(n) * (k_max + 1));
  for (int center = 0; center < n; ++center) {
    const std::vector<int> order = nearest_neighbors(dist, center, k_max);
    Zone zone;
    zone.members.push_back(center);
    zones.push_back(zone);
    for (int j = 0; j < k_max; ++j) {
      zone.members.push_back(order[j]);
      zones.push_back(zone);
    }
  }
  canonicalize(zones);
  return {std::move(zones)};
}

AdjacencyRelation adjacency_from_knn(const DistanceMatrix& dist, int k) {
  const int n = dist.size();
  if (k < 0 || k > n - 1) throw ParameterError("k must lie in [0, n-1]");
  AdjacencyRelation adj;
  adj.n = n;
  adj.neighbors.assign(n, {});
  for (int i = 0; i < n; ++i) {
    for (int j : nearest_neighbors(dist, i, k)) {
      adj.neighbors[i].push_back(j);
      adj.neighbors[j].push_back(i);
    }
  }
  for (auto& list : adj.neighbors) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

namespace {

void check_adjacency(const AdjacencyRelation& adj, int n) {
  if (adj.n != n || static_cast<int>(adj.neighbors.size()) != n) {
    throw DimensionError("adjacency relation does not match the distance matrix");
  }
  for (int i = 0; i < n; ++i) {
    for (int j : adj.neighbors[i]) {
      if (j < 0 || j >= n) throw DimensionError("adjacency index out of range");
      if (j == i) throw ParameterError("adjacency must be irreflexive");
      const auto& back = adj.neighbors[j];
      if (!std::binary_search(back.begin(), back.end(), i)) {
        throw ParameterError("adjacency must be symmetric");
      }
    }
    if (!std::is_sorted(adj.neighbors[i].begin(), adj.neighbors[i].end())) {
      throw ParameterError("adjacency neighbor lists must be sorted");
    }
  }
}

// Connected-subset enumeration rooted at local index 0.  Each call emits the
// current set, then extends by one candidate at a time; candidates tried
// earlier become forbidden in later branches, so no subset repeats.
struct FlexEnumerator {
  const std::vector<std::vector<int>>& local_adj;
  int max_size;
  std::vector<Zone>& out;
  const std::vector<int>& pool;  // local index -> global location

  std::vector<int> current;          // local indices, unsorted
  std::vector<char> in_current;
  std::vector<char> forbidden;

  void run() {
    current = {0};
    in_current.assign(local_adj.size(), 0);
    forbidden.assign(local_adj.size(), 0);
    in_current[0] = 1;
    extend();
  }

  void extend() {
    Zone zone;
    zone.members.reserve(current.size());
    for (int v : current) zone.members.push_back(pool[v]);
    out.push_back(std::move(zone));
    if (static_cast<int>(current.size()) >= max_size) return;

    std::vector<int> candidates;
    for (int v : current) {
      for (int w : local_adj[v]) {
        if (!in_current[w] && !forbidden[w]) candidates.push_back(w);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());

    for (size_t i = 0; i < candidates.size(); ++i) {
      const int v = candidates[i];
      current.push_back(v);
      in_current[v] = 1;
      extend();
      in_current[v] = 0;
      current.pop_back();
      forbidden[v] = 1;
    }
    for (int v : candidates) forbidden[v] = 0;
  }
};

}  // namespace

ZoneSet flex_zones(const DistanceMatrix& dist, const AdjacencyRelation& adjacency,
                   int max_size) {
  const int n = dist.size();
  if (max_size < 1 || max_size > n) {
    throw ParameterError("max_size must lie in [1, n]");
  }
  check_adjacency(adjacency, n);

  std::vector<Zone> zones;
  for (int center = 0; center < n; ++center) {
    std::vector<int> pool;
    pool.push_back(center);
    for (int j : nearest_neighbors(dist, center, max_size - 1)) pool.push_back(j);

    std::vector<int> local_of(n, -1);
    for (size_t i = 0; i < pool.size(); ++i) local_of[pool[i]] = static_cast<int>(i);

    std::vector<std::vector<int>> local_adj(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) {
      for (int j : adjacency.neighbors[pool[i]]) {
        if (local_of[j] >= 0) local_adj[i].push_back(local_of[j]);
      }
    }
    FlexEnumerator enumerator{local_adj, max_size, zones, pool, {}, {}, {}};
    enumerator.run();
  }
  canonicalize(zones);
  return {std::move(zones)};
}

}  // namespace zipscan
