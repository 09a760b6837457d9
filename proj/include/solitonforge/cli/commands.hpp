#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "solitonforge/cli/config.hpp"

namespace solitonforge::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,     // a verification criterion failed
  kConfigError = 2,     // usage, parse or validation error
  kNumericalError = 3,  // integration, reconstruction or analysis error
  kIoError = 4,
};

struct CommandLine {
  std::string command;  // solve | verify | curvature | oracle | ricci-flat | sweep
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<Format> format;
  std::optional<double> tol;
  std::optional<double> seed_eps0;
  std::vector<std::string> seed_eps;  // "i=value", i the 1-based factor index (>= 2)
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputEnv = "SOLITONFORGE_OUT";

/// Applies command-line overrides to a parsed configuration.
void apply_overrides(const CommandLine& cl, RunConfig& cfg);

/// Output directory: --out, then the config, then $SOLITONFORGE_OUT, then ./solitonforge_out.
std::filesystem::path output_dir(const CommandLine& cl, const RunConfig& cfg);

int run_command(const CommandLine& cl, const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full entry point: argument parsing, config loading, dispatch, error mapping.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace solitonforge::cli
