#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>

namespace zipscan {

// Invalid parameter values or out-of-domain arguments.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mismatched shapes between grids, zones, or location sets.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A sample that cannot support the requested estimate (e.g. zero variance).
class DegenerateSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files.  `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, const std::string& what);
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

// Every stochastic routine takes an explicitly seeded engine.  Sub-streams
// are derived from (master seed, path of tags) so any unit of work draws the
// same numbers no matter how work is scheduled across threads.
using RngEngine = std::mt19937_64;

RngEngine make_stream(std::uint64_t master_seed,
                      std::initializer_list<std::uint32_t> path);

}  // namespace zipscan
