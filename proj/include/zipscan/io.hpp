#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "zipscan/grid.hpp"
#include "zipscan/simulation.hpp"
#include "zipscan/zones.hpp"

namespace zipscan {

// Counts in long form: header "location_id,time,count", one row per cell.
// time = 1 is the most recent period; every (location, time) pair must be
// present exactly once.  Locations keep first-appearance order.
struct CountData {
  std::vector<std::string> location_ids;
  CountGrid grid = CountGrid(1, 1);
};
CountData ingest_counts(const std::filesystem::path& path);
void write_counts(const std::filesystem::path& path, const CountData& data);

// Baselines in long form: header "location_id,time,p,mu".
struct BaselineData {
  std::vector<std::string> location_ids;
  BaselineGrid grid = BaselineGrid(1, 1);
};
BaselineData ingest_baselines(const std::filesystem::path& path);

// Geometry: either "location_id,x,y" coordinate rows, or a raw square
// distance matrix (comma or whitespace separated, no header).  Matrix input
// carries no ids; callers pair it with the counts file positionally.
enum class GeometryKind { kCoordinates, kMatrix };
struct GeometryData {
  GeometryKind kind = GeometryKind::kMatrix;
  std::vector<std::string> location_ids;
  std::vector<Point> points;  // coordinates mode only
  DistanceMatrix distances = DistanceMatrix(1);
};
GeometryData ingest_geometry(const std::filesystem::path& path);

// Stored scan statistics: header "replicate,lambda", replicates numbered
// from 1 in order.
std::vector<double> ingest_history(const std::filesystem::path& path);
void write_history(const std::filesystem::path& path,
                   const std::vector<double>& values);

std::string method_name(Statistic statistic);
Statistic parse_method(const std::string& name);

// "%.9g" rendering; NaN becomes "NA".
std::string format_table_double(double value);

std::string experiment_table_csv(const ExperimentTable& table);
void write_experiment_table(const std::filesystem::path& path,
                            const ExperimentTable& table);

}  // namespace zipscan
