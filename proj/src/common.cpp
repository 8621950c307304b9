#include "zipscan/common.hpp"

#include <vector>

namespace zipscan {

ParseError::ParseError(const std::string& file, int line, const std::string& what)
    : std::runtime_error(line > 0 ? file + ":" + std::to_string(line) + ": " + what
                                  : file + ": " + what),
      file_(file),
      line_(line) {}

RngEngine make_stream(std::uint64_t master_seed,
                      std::initializer_list<std::uint32_t> path) {
  std::vector<std::uint32_t> material;
  material.reserve(path.size() + 2);
  material.push_back(static_cast<std::uint32_t>(master_seed));
  material.push_back(static_cast<std::uint32_t>(master_seed >> 32));
  material.insert(material.end(), path.begin(), path.end());
  std::seed_seq seq(material.begin(), material.end());
  return RngEngine(seq);
}

}  // namespace zipscan
