#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "solitonforge/cli/config.hpp"
#include "solitonforge/flow.hpp"
#include "solitonforge/geometry.hpp"
#include "solitonforge/oracle.hpp"
#include "solitonforge/reconstruct.hpp"
#include "solitonforge/verify.hpp"

namespace solitonforge::cli {

/// s, t, X_1..X_r, Y_1..Y_r, L, H, g_1..g_r, g_dot_1.., g_ddot_1.., u, u_dot, u_ddot
std::vector<std::string> profile_columns(std::size_t rank);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Profile rows (every thin-th row and always the last) as a numeric table.
Table profile_table(const flow::Trajectory& traj, const reconstruct::MetricProfile& profile, std::size_t thin = 1);

/// CSV with 17 significant digits, so that reading it back is exact.
void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

/// {"columns": [...], "rows": [[...], ...]}
void write_table_json(const std::filesystem::path& path, const Table& table);
void write_table(const std::filesystem::path& dir, const std::string& stem, const Table& table, Format format);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Two-column (t, value) series named "<quantity>_vs_t.dat". Quantities:
/// g, g_dot, g_ddot (one file per factor, e.g. g1_vs_t), u, u_dot, u_ddot, L, H,
/// and R when a curvature report is given.
std::vector<std::filesystem::path> write_plot_series(const std::filesystem::path& dir,
                                                     const reconstruct::MetricProfile& profile,
                                                     const std::vector<std::string>& quantities,
                                                     const geometry::CurvatureReport* curv = nullptr);

Table curvature_table(const reconstruct::MetricProfile& profile, const geometry::CurvatureReport& curv,
                      std::size_t thin = 1);

nlohmann::json to_json(const verify::VerifyReport& rep);
nlohmann::json to_json(const geometry::AsymptoticsReport& rep);
nlohmann::json to_json(const oracle::CrossValidation& cv);
nlohmann::json trajectory_summary(const flow::Trajectory& traj, const reconstruct::MetricProfile& profile);

}  // namespace solitonforge::cli
