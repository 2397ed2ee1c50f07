#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace turnpike {

/// One CLI invocation. Unset optionals take per-scenario defaults.
struct RunConfig {
  std::string command;  // analyze | optimize | verify | reproduce
  std::string scenario;
  std::string input;
  std::string ideal;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> beam;
  std::optional<double> trim;
  std::optional<double> grid;
  std::optional<double> theta;
  std::optional<double> eps;
  std::uint64_t seed = 1;
  std::string output = "json";  // json | csv | both
  std::string out_dir = ".";
  std::optional<int> k_max;
  std::optional<std::size_t> dim;
  std::string branches;  // "slope:offset,slope:offset" for the ifs scenario
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

/// Merges a config file into `cfg`. The text is JSON when it starts with '{',
/// otherwise `key = value` lines grouped under [run], [search], [analysis]
/// and [scenario] headers ('#' starts a comment). Keys outside any section
/// are looked up in all sections. Unknown keys raise ConfigError.
void apply_config_text(const std::string& text, RunConfig& cfg);
void load_config_file(const std::string& path, RunConfig& cfg);

/// Checks the command, output format and scenario name.
void validate(const RunConfig& cfg);

/// Executes the pipeline, writes reports under cfg.out_dir and a one-line
/// summary per check to `out`. Returns kExitPass, kExitFail or kExitConfig.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace turnpike
