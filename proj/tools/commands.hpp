#pragma once

#include "config.hpp"

#include <string>
#include <vector>

namespace qplab::cli {

struct RunResult {
  int exit_code = 0;  // 0 ok, 2 hypothesis refused (soft)
  std::vector<std::string> artifacts;
  std::string note;   // printed to stderr when non-empty
};

// Runs one experiment and writes its artifacts, including <out>.config.json.
RunResult run(const ExperimentConfig& cfg);

}  // namespace qplab::cli
