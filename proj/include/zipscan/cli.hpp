#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace zipscan::cli {

// Argument structs mirror the command-line surface; the run_* functions do
// the work and return the process exit code.  Usage and data problems are
// reported by throwing; main turns those into exit code 1.

struct ScanArgs {
  std::filesystem::path counts;
  std::filesystem::path baselines;
  std::filesystem::path geometry;
  std::string statistic = "eb-zip";
  std::string zones = "knn";
  int kmax = -1;         // knn: order of the largest zone; flex: adjacency order
  int max_size = 10;     // flex zone size cap
  int max_duration = 0;  // 0 = every available period
  std::string pvalue = "gumbel";
  int replicates = 999;
  std::filesystem::path history;  // empirical method only
  double alpha = 0.05;
  int top_k = 5;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::filesystem::path out;  // empty = stdout
};
// 0 = no signal, 2 = P < alpha.
int run_scan(const ScanArgs& args);

struct ZonesArgs {
  std::filesystem::path geometry;
  std::string zones = "knn";
  int kmax = -1;
  int max_size = 10;
  std::filesystem::path out;  // empty = stdout
};
int run_zones(const ZonesArgs& args);

struct CalibrateArgs {
  std::filesystem::path baselines;
  std::filesystem::path geometry;
  std::string statistic = "eb-zip";
  std::string zones = "knn";
  int kmax = -1;
  int max_size = 10;
  int max_duration = 0;
  int replicates = 999;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::filesystem::path out;
};
int run_calibrate(const CalibrateArgs& args);

struct SimulateArgs {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;  // overrides the seed in the config file
  int threads = 1;
  std::filesystem::path out;
};
int run_simulate(const SimulateArgs& args);

}  // namespace zipscan::cli
