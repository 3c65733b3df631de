#pragma once

// Reproducible experiment runner behind the command-line tool. Each run writes
// <experiment>_<seed>.<csv|json> and <experiment>_<seed>.manifest.json.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fecim::cli {

inline constexpr std::string_view kToolVersion = "0.3.1";

inline constexpr std::string_view kExperiments[] = {
    "transfer-curve", "worst-case", "sense-margin", "scaling", "edp-table", "hdc-quality", "map-workload"};

struct ExperimentConfig {
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = ".";
  std::string format = "csv";
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
};

/// Reads {"experiment", "seed", "out", "format", "params"} from JSON text.
ExperimentConfig parse_config(std::string_view json_text);

/// Every problem with the config, all at once. Empty means runnable.
std::vector<std::string> validate(const ExperimentConfig& config);

struct Output {
  std::string data;        // CSV or JSON payload
  std::string summary;     // human-readable, for the terminal
};

/// Runs the experiment in memory. Throws ParameterError on invalid configs.
Output render(const ExperimentConfig& config);

struct RunResult {
  int exit_code = 0;                         // 0 ok, 1 runtime failure, 2 invalid config
  std::vector<std::filesystem::path> files;
  std::string message;
};

RunResult run(const ExperimentConfig& config);

}  // namespace fecim::cli
