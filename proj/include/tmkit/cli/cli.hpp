#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tmkit {

enum ExitCode : int { exit_ok = 0, exit_failed = 1, exit_usage = 2 };

struct CliConfig {
  std::string command;
  /// fixture name, fixture directory, or .tm file
  std::string input;
  std::string events_path;
  std::string groups_path;
  std::vector<std::string> scenario_paths;
  std::string trace_path;
  std::string out_path;
  std::string report_path;
  std::vector<std::string> injections;
  std::size_t max_steps = 10000;
  std::optional<std::size_t> max_parts;
  bool auto_carve = false;
  std::string format = "dot";
  int verbosity = 0;
};

/// Runs one command. Normal output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(const CliConfig& config, std::ostream& out, std::ostream& err);

}  // namespace tmkit
