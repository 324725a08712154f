#pragma once

#include "timewarp/penalty.hpp"
#include "timewarp/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace timewarp::cli {

/// Bad configuration or input; maps to exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct JobConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string output_dir = ".";

  PenaltySpec penalties;
  SolveParams params;

  double test_fraction = 0.5;
  std::uint64_t seed = 0;
  std::vector<double> lambda_cum_grid;
  std::vector<double> lambda_inst_grid;

  int rounds = 5;
  bool centered = false;
  int K = 2;

  /// Write measured timings; off gives byte-identical reruns.
  bool timing = true;
  bool plots = true;
};

/// Every key accepted in a config file or via --set.
const std::vector<std::string>& known_keys();

/// Parse a --set value: bool, number, comma-separated number list, or string.
nlohmann::json parse_set_value(const std::string& text);

/**
 * Merge the config file object with --set overrides (later wins) and build a
 * validated JobConfig. Throws ConfigError naming the offending key.
 */
JobConfig build_config(const std::string& command, const nlohmann::json& file_config,
                       const std::vector<std::string>& overrides,
                       const std::vector<std::string>& inputs, const std::string& output_dir,
                       std::optional<std::uint64_t> seed);

/// Read a JSON config file (an object). Throws ConfigError.
nlohmann::json read_config_file(const std::string& path);

}  // namespace timewarp::cli
