#include "solitonforge/cli/export.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "solitonforge/error.hpp"

namespace solitonforge::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void io_fail(const std::string& detail) { throw Error("cli", Errc::IoError, detail); }

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) io_fail("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) io_fail("write failed for " + path.string());
}

std::vector<std::size_t> kept_rows(std::size_t n, std::size_t thin) {
  std::vector<std::size_t> keep;
  if (thin == 0) thin = 1;
  for (std::size_t k = 0; k < n; k += thin) keep.push_back(k);
  if (n > 0 && keep.back() != n - 1) keep.push_back(n - 1);
  return keep;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::vector<std::string> profile_columns(std::size_t r) {
  std::vector<std::string> cols{"s", "t"};
  auto add = [&](const std::string& stem) {
    for (std::size_t i = 1; i <= r; ++i) cols.push_back(stem + std::to_string(i));
  };
  add("X_");
  add("Y_");
  cols.push_back("L");
  cols.push_back("H");
  add("g_");
  add("g_dot_");
  add("g_ddot_");
  cols.push_back("u");
  cols.push_back("u_dot");
  cols.push_back("u_ddot");
  return cols;
}

Table profile_table(const flow::Trajectory& traj, const reconstruct::MetricProfile& profile, std::size_t thin) {
  const std::size_t r = profile.rank();
  Table t;
  t.header = profile_columns(r);
  for (std::size_t k : kept_rows(profile.rows.size(), thin)) {
    const auto& row = profile.rows[k];
    const auto& p = traj.samples.at(k);
    std::vector<double> v{row.s, row.t};
    v.insert(v.end(), p.X.begin(), p.X.end());
    v.insert(v.end(), p.Y.begin(), p.Y.end());
    v.push_back(row.L);
    v.push_back(row.H);
    v.insert(v.end(), row.g.begin(), row.g.end());
    v.insert(v.end(), row.g_dot.begin(), row.g_dot.end());
    v.insert(v.end(), row.g_ddot.begin(), row.g_ddot.end());
    v.push_back(row.u);
    v.push_back(row.u_dot);
    v.push_back(row.u_ddot);
    t.rows.push_back(std::move(v));
  }
  return t;
}

void write_csv(const fs::path& path, const Table& table) {
  auto out = open_out(path);
  for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << num17(row[c]);
    out << '\n';
  }
  finish(out, path);
}

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) io_fail("cannot read " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) io_fail(path.string() + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        io_fail(path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != t.header.size()) io_fail(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_json(const fs::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

void write_table_json(const fs::path& path, const Table& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    json row = json::array();
    for (double v : r) row.push_back(number_or_null(v));
    rows.push_back(std::move(row));
  }
  write_json(path, json{{"columns", table.header}, {"rows", std::move(rows)}});
}

void write_table(const fs::path& dir, const std::string& stem, const Table& table, Format format) {
  if (format == Format::Csv)
    write_csv(dir / (stem + ".csv"), table);
  else
    write_table_json(dir / (stem + ".json"), table);
}

std::vector<fs::path> write_plot_series(const fs::path& dir, const reconstruct::MetricProfile& profile,
                                        const std::vector<std::string>& quantities,
                                        const geometry::CurvatureReport* curv) {
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, auto value) {
    const fs::path path = dir / (name + "_vs_t.dat");
    auto out = open_out(path);
    out << "# t " << name << '\n';
    for (std::size_t k = 0; k < profile.rows.size(); ++k)
      out << num17(profile.rows[k].t) << ' ' << num17(value(k)) << '\n';
    finish(out, path);
    written.push_back(path);
  };
  const std::set<std::string> per_factor{"g", "g_dot", "g_ddot"};
  for (const auto& q : quantities) {
    if (per_factor.count(q)) {
      for (std::size_t i = 0; i < profile.rank(); ++i) {
        const std::string name = q + std::to_string(i + 1);
        if (q == "g") emit(name, [&, i](std::size_t k) { return profile.rows[k].g[i]; });
        if (q == "g_dot") emit(name, [&, i](std::size_t k) { return profile.rows[k].g_dot[i]; });
        if (q == "g_ddot") emit(name, [&, i](std::size_t k) { return profile.rows[k].g_ddot[i]; });
      }
    } else if (q == "u") {
      emit(q, [&](std::size_t k) { return profile.rows[k].u; });
    } else if (q == "u_dot") {
      emit(q, [&](std::size_t k) { return profile.rows[k].u_dot; });
    } else if (q == "u_ddot") {
      emit(q, [&](std::size_t k) { return profile.rows[k].u_ddot; });
    } else if (q == "L") {
      emit(q, [&](std::size_t k) { return profile.rows[k].L; });
    } else if (q == "H") {
      emit(q, [&](std::size_t k) { return profile.rows[k].H; });
    } else if (q == "R") {
      if (curv) emit(q, [&](std::size_t k) { return curv->samples[k].scalar_R; });
    } else {
      throw Error("cli", Errc::ValidationError, "unknown plot quantity '" + q + "'");
    }
  }
  return written;
}

Table curvature_table(const reconstruct::MetricProfile& profile, const geometry::CurvatureReport& curv,
                      std::size_t thin) {
  const std::size_t r = profile.rank();
  Table t;
  t.header = {"t", "ric_tt"};
  for (std::size_t i = 1; i <= r; ++i) t.header.push_back("ric_" + std::to_string(i));
  for (std::size_t i = 1; i <= r; ++i) t.header.push_back("K_t_" + std::to_string(i));
  for (std::size_t i = 1; i <= r; ++i)
    for (std::size_t j = i + 1; j <= r; ++j) t.header.push_back("K_" + std::to_string(i) + "_" + std::to_string(j));
  for (std::size_t i = 1; i <= r; ++i) {
    t.header.push_back("K_within_min_" + std::to_string(i));
    t.header.push_back("K_within_max_" + std::to_string(i));
  }
  t.header.insert(t.header.end(), {"R", "R_trace", "soliton_residual"});
  for (std::size_t k : kept_rows(curv.samples.size(), thin)) {
    const auto& cs = curv.samples[k];
    std::vector<double> v{cs.t, cs.ric_tt};
    v.insert(v.end(), cs.ric_factor.begin(), cs.ric_factor.end());
    v.insert(v.end(), cs.sectional_mixed_t.begin(), cs.sectional_mixed_t.end());
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = i + 1; j < r; ++j) v.push_back(cs.sectional_cross[i][j]);
    for (std::size_t i = 0; i < r; ++i) {
      v.push_back(cs.sectional_within_min[i]);
      v.push_back(cs.sectional_within_max[i]);
    }
    v.insert(v.end(), {cs.scalar_R, cs.scalar_R_trace, cs.soliton_residual});
    t.rows.push_back(std::move(v));
  }
  return t;
}

json to_json(const verify::VerifyReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"id", c.id},
                      {"name", c.name},
                      {"claim", c.claim},
                      {"measured", number_or_null(c.measured)},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed},
                      {"detail", c.detail}});
  const auto& d = rep.diagnostics;
  json diag{{"kappa", d.kappa},
            {"rho_estimate", d.rho_estimate},
            {"x1_ratio_limit", d.x1_ratio_limit},
            {"L_exponent", d.L_exponent},
            {"Y_exponents", d.Y_exponents},
            {"L_scaled_limit", d.L_scaled_limit},
            {"seed_ratio_limits", d.seed_ratio_limits},
            {"Q_limits", d.Q_limits},
            {"boundary_g", d.boundary_g},
            {"boundary_g_dot", d.boundary_g_dot},
            {"boundary_g_ddot", d.boundary_g_ddot},
            {"boundary_u_dot", d.boundary_u_dot},
            {"boundary_u_ddot", d.boundary_u_ddot},
            {"u0_product", d.u0_product},
            {"u0_extrapolated", d.u0_extrapolated},
            {"scale_limit", d.scale_limit}};
  return json{{"passed", rep.passed()}, {"checks", std::move(checks)}, {"diagnostics", std::move(diag)}};
}

json to_json(const geometry::AsymptoticsReport& rep) {
  json ladder = json::array();
  for (const auto& [t, v] : rep.R_t2_ladder) ladder.push_back({t, v});
  return json{{"g_gdot_limit", rep.g_gdot_limit},
              {"g_gdot_error", rep.g_gdot_error},
              {"g_gdot_target", rep.g_gdot_target},
              {"g_sq_over_t", rep.g_sq_over_t},
              {"g_sq_over_t_target", rep.g_sq_over_t_target},
              {"g_sq_exponent", rep.g_sq_exponent},
              {"K_slope", rep.K_slope},
              {"R_slope", rep.R_slope},
              {"R_t_limit", rep.R_t_limit},
              {"R_t2_ladder", std::move(ladder)},
              {"R_t2_increasing", rep.R_t2_increasing},
              {"cross_negative_at_large_t", rep.cross_negative_at_large_t},
              {"t_first", rep.t_first},
              {"t_last", rep.t_last}};
}

json to_json(const oracle::CrossValidation& cv) {
  return json{{"t0", cv.t0},
              {"t_end", cv.t_end},
              {"deviation", {{"g", cv.deviation.g}, {"g_dot", cv.deviation.g_dot}, {"u_dot", cv.deviation.u_dot}}},
              {"rows_compared", cv.deviation.compared},
              {"conservation_initial", cv.conservation_initial},
              {"conservation_drift", cv.conservation_drift}};
}

json trajectory_summary(const flow::Trajectory& traj, const reconstruct::MetricProfile& profile) {
  const auto& st = traj.stats;
  json stats{{"accepted", st.accepted},
             {"rejected", st.rejected},
             {"explicit_steps", st.explicit_steps},
             {"implicit_steps", st.implicit_steps},
             {"stiffness_switch_s", st.switched ? json(st.stiff_switch_s) : json(nullptr)}};
  if (traj.mode == model::Mode::RicciFlat) stats["max_constraint_drift"] = st.max_constraint_drift;
  return json{{"mode", traj.mode == model::Mode::Soliton ? "soliton" : "ricci-flat"},
              {"termination", std::string(flow::termination_name(traj.termination))},
              {"samples", traj.samples.size()},
              {"s_range", {traj.s_front(), traj.s_back()}},
              {"t_range", {profile.rows.front().t, profile.rows.back().t}},
              {"kappa_estimate", traj.kappa_estimate},
              {"u_gauge", profile.u_gauge},
              {"steps", std::move(stats)}};
}

}  // namespace solitonforge::cli
