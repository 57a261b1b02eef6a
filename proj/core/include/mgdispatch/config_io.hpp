#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>

#include "mgdispatch/model.hpp"

namespace mgdispatch {

// Run parameters carried alongside the problem in the config file; every
// field can be overridden by a command line flag.
struct RunConfig {
  std::string solver = "admm";  // admm | central | lmp
  int n_scenarios = 1000;
  int mean_samples = 20000;
  std::uint64_t seed = 1;
  double rho = 1.0;
  double nu = 0.5;
  double eps_res = 1e-2;
  int max_iters = 200;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads and fully validates a problem + run configuration. Parse failures
// carry the offending field path; validation failures are reported
// exhaustively in one message.
std::pair<DispatchProblem, RunConfig> parse_config(const std::filesystem::path& path);
std::pair<DispatchProblem, RunConfig> parse_config_text(const std::string& text);

std::string config_to_json(const DispatchProblem& problem, const RunConfig& run);

}  // namespace mgdispatch
