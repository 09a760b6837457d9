#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "solitonforge/model.hpp"

namespace solitonforge::cli {

enum class Format { Csv, Json };

struct OutputOptions {
  std::string dir;             // empty: decided by the command line or the environment
  Format format = Format::Csv;
  std::size_t thin = 1;        // keep every n-th profile row (the last row is always kept)
  std::vector<std::string> plots{"g"};  // quantities written as (t, value) series
};

struct SweepOptions {
  std::vector<double> ratios{0.25, 0.5, 1.0, 2.0, 4.0};  // eps_k / |eps0|
  std::size_t factor = 2;                                  // 1-based index k of the swept factor
};

struct OracleOptions {
  double t0_factor = 10.0;
  double decades = 1.0;
  double rel_tol = 1e-12;
};

struct RunConfig {
  model::ProblemSpec spec;
  OutputOptions output;
  SweepOptions sweep;
  OracleOptions oracle;
  std::vector<std::pair<double, double>> sectional_bounds;  // empty: round-sphere defaults
};

/// Strict JSON configuration. Unknown keys and wrong types raise
/// cli.ParseError (with the line or the field path); a spec rejected by the
/// model raises cli.ValidationError carrying the model's code.
RunConfig parse_config_text(const std::string& text, const std::string& source = "<inline>");
RunConfig parse_config(const std::filesystem::path& path);

/// Re-runs model validation after command-line overrides.
void revalidate(RunConfig& cfg);

std::string format_name(Format f);

}  // namespace solitonforge::cli
