#include "solitonforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "solitonforge/error.hpp"

namespace solitonforge::geometry {
namespace {

[[noreturn]] void fail(Errc code, const std::string& detail) { throw Error("geometry", code, detail); }

double trace_L(const reconstruct::ProfileRow& row, const std::vector<model::FactorSpec>& factors) {
  double tr = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) tr += factors[i].dim * row.g_dot[i] / row.g[i];
  return tr;
}

RicciSample ricci_row(const reconstruct::ProfileRow& row, const std::vector<model::FactorSpec>& factors) {
  for (std::size_t i = 0; i < factors.size(); ++i)
    if (!(row.g[i] != 0.0)) fail(Errc::ZeroG, "g_" + std::to_string(i + 1) + " = 0");
  RicciSample out;
  out.t = row.t;
  const double tr = trace_L(row, factors);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const double gi = row.g[i];
    const double li = row.g_dot[i] / gi;
    out.ric_tt -= factors[i].dim * row.g_ddot[i] / gi;
    out.ric_factor.push_back(factors[i].einstein_const / (gi * gi) - row.g_ddot[i] / gi - li * (tr - li));
  }
  return out;
}

double row_residual(const RicciSample& ric, const HessianSample& hess) {
  double worst = std::abs(ric.ric_tt + hess.normal);
  for (std::size_t i = 0; i < ric.ric_factor.size(); ++i)
    worst = std::max(worst, std::abs(ric.ric_factor[i] + hess.factor[i]));
  return worst;
}

// Least-squares slope of log|y| against log x.
double log_slope(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(pts.size());
  for (const auto& [x, y] : pts) {
    const double lx = std::log(x), ly = std::log(std::abs(y));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::vector<RicciSample> ricci_components(const reconstruct::MetricProfile& profile) {
  std::vector<RicciSample> out;
  out.reserve(profile.rows.size());
  for (const auto& row : profile.rows) out.push_back(ricci_row(row, profile.factors));
  return out;
}

HessianSample potential_hessian(const reconstruct::ProfileRow& row) {
  HessianSample h;
  h.normal = row.u_ddot;
  for (std::size_t i = 0; i < row.g.size(); ++i) h.factor.push_back(row.u_dot * row.g_dot[i] / row.g[i]);
  return h;
}

double soliton_residual(const reconstruct::MetricProfile& profile) {
  double worst = 0.0;
  for (const auto& row : profile.rows)
    worst = std::max(worst, row_residual(ricci_row(row, profile.factors), potential_hessian(row)));
  return worst;
}

std::vector<std::pair<double, double>> default_sectional_bounds(const model::ProblemSpec& spec) {
  std::vector<std::pair<double, double>> out;
  for (const auto& f : spec.factors) {
    if (f.dim < 2) {
      out.emplace_back(0.0, 0.0);
    } else {
      const double k = f.einstein_const / (f.dim - 1.0);
      out.emplace_back(k, k);
    }
  }
  return out;
}

CurvatureReport sectional_curvatures(const reconstruct::MetricProfile& profile,
                                     const std::vector<std::pair<double, double>>& K_h_bounds) {
  const std::size_t r = profile.rank();
  if (K_h_bounds.size() != r) fail(Errc::LengthMismatch, "one K_h interval per factor is required");
  CurvatureReport rep;
  rep.min_ricci = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : profile.rows) {
    const auto ric = ricci_row(row, profile.factors);
    const auto hess = potential_hessian(row);
    CurvatureSample cs;
    cs.t = row.t;
    cs.ric_tt = ric.ric_tt;
    cs.ric_factor = ric.ric_factor;
    cs.sectional_cross.assign(r, std::vector<double>(r, nan));
    for (std::size_t i = 0; i < r; ++i) {
      const double li = row.g_dot[i] / row.g[i];
      cs.sectional_mixed_t.push_back(-row.g_ddot[i] / row.g[i]);
      for (std::size_t j = 0; j < i; ++j)
        cs.sectional_cross[i][j] = cs.sectional_cross[j][i] = -li * (row.g_dot[j] / row.g[j]);
      if (profile.factors[i].dim < 2) {
        cs.sectional_within_min.push_back(nan);
        cs.sectional_within_max.push_back(nan);
      } else {
        const double g2 = row.g[i] * row.g[i], gd2 = row.g_dot[i] * row.g_dot[i];
        cs.sectional_within_min.push_back((K_h_bounds[i].first - gd2) / g2);
        cs.sectional_within_max.push_back((K_h_bounds[i].second - gd2) / g2);
      }
    }
    cs.scalar_R = ric.ric_tt;
    for (std::size_t i = 0; i < r; ++i) cs.scalar_R += profile.factors[i].dim * ric.ric_factor[i];
    cs.scalar_R_trace = -(row.u_ddot + trace_L(row, profile.factors) * row.u_dot);
    cs.soliton_residual = row_residual(ric, hess);

    rep.soliton_residual_max = std::max(rep.soliton_residual_max, cs.soliton_residual);
    rep.min_ricci = std::min(rep.min_ricci, ric.ric_tt);
    rep.max_abs_ricci = std::max(rep.max_abs_ricci, std::abs(ric.ric_tt));
    for (double v : ric.ric_factor) {
      rep.min_ricci = std::min(rep.min_ricci, v);
      rep.max_abs_ricci = std::max(rep.max_abs_ricci, std::abs(v));
    }
    const double scale = std::max({std::abs(cs.scalar_R), std::abs(cs.scalar_R_trace), 1e-300});
    rep.max_scalar_mismatch = std::max(rep.max_scalar_mismatch, std::abs(cs.scalar_R - cs.scalar_R_trace) / scale);
    rep.samples.push_back(std::move(cs));
  }
  return rep;
}

AsymptoticsReport asymptotics(const reconstruct::MetricProfile& profile, const model::ProblemSpec& spec) {
  const auto& rows = profile.rows;
  if (rows.size() < 10) fail(Errc::InsufficientTail, "profile has fewer than 10 rows");
  AsymptoticsReport rep;
  rep.t_first = rows.front().t;
  rep.t_last = rows.back().t;
  // The final two decades must lie far beyond the collapse scale.
  if (!(rep.t_last > 1e6 * rep.t_first) || !(rows.back().L < -0.999))
    fail(Errc::InsufficientTail, "trajectory did not reach the asymptotic regime (t_last = " +
                                     std::to_string(rep.t_last) + ")");

  // Rows nearest to a geometric ladder over [t_last / 100, t_last].
  constexpr int rungs = 9;
  std::vector<std::size_t> ladder;
  for (int j = 0; j < rungs; ++j) {
    const double target = rep.t_last * std::pow(10.0, -2.0 + 2.0 * j / (rungs - 1));
    auto it = std::lower_bound(rows.begin(), rows.end(), target,
                               [](const reconstruct::ProfileRow& row, double t) { return row.t < t; });
    std::size_t k = static_cast<std::size_t>(std::min(it - rows.begin(), static_cast<std::ptrdiff_t>(rows.size() - 1)));
    if (ladder.empty() || k > ladder.back()) ladder.push_back(k);
  }
  if (ladder.size() < 4) fail(Errc::InsufficientTail, "too few samples in the final two decades");

  const auto bounds = default_sectional_bounds(spec);
  std::vector<reconstruct::ProfileRow> tail_rows;
  for (auto k : ladder) tail_rows.push_back(rows[k]);
  reconstruct::MetricProfile tail = profile;
  tail.rows = tail_rows;
  const auto curv = sectional_curvatures(tail, bounds);

  const double sqrt_mC = std::sqrt(-profile.gauge_C);
  for (std::size_t i = 0; i < profile.rank(); ++i) {
    const double lam = profile.factors[i].einstein_const;
    std::vector<std::pair<double, double>> pts, gsq;
    for (const auto& row : tail_rows) {
      pts.emplace_back(1.0 / row.t, row.g[i] * row.g_dot[i]);
      gsq.emplace_back(row.t, row.g[i] * row.g[i]);
    }
    const auto ext = verify::richardson_extrapolate(pts, 3, verify::Parity::None);
    rep.g_gdot_limit.push_back(ext.limit);
    rep.g_gdot_error.push_back(ext.error_estimate);
    rep.g_gdot_target.push_back(lam / sqrt_mC);
    const auto& last = rows.back();
    rep.g_sq_over_t.push_back(last.g[i] * last.g[i] / last.t);
    rep.g_sq_over_t_target.push_back(2.0 * lam / sqrt_mC);
    rep.g_sq_exponent.push_back(log_slope(gsq));
  }

  std::vector<std::pair<double, double>> Kpts, Rpts;
  bool increasing = true;
  double prev_Rt2 = -std::numeric_limits<double>::infinity();
  for (const auto& cs : curv.samples) {
    double kmax = 0.0;
    for (std::size_t i = 0; i < profile.rank(); ++i) {
      kmax = std::max(kmax, std::abs(cs.sectional_mixed_t[i]));
      if (!std::isnan(cs.sectional_within_max[i]))
        kmax = std::max({kmax, std::abs(cs.sectional_within_min[i]), std::abs(cs.sectional_within_max[i])});
      for (std::size_t j = 0; j < profile.rank(); ++j)
        if (j != i) kmax = std::max(kmax, std::abs(cs.sectional_cross[i][j]));
    }
    Kpts.emplace_back(cs.t, kmax);
    Rpts.emplace_back(cs.t, cs.scalar_R);
    const double Rt2 = cs.scalar_R * cs.t * cs.t;
    rep.R_t2_ladder.emplace_back(cs.t, Rt2);
    increasing = increasing && Rt2 > prev_Rt2;
    prev_Rt2 = Rt2;
  }
  rep.K_slope = log_slope(Kpts);
  rep.R_slope = log_slope(Rpts);
  rep.R_t2_increasing = increasing;
  rep.R_t_limit = curv.samples.back().scalar_R * curv.samples.back().t;
  if (profile.rank() >= 2) {
    const auto& cross = curv.samples.back().sectional_cross;
    for (std::size_t i = 0; i < profile.rank(); ++i)
      for (std::size_t j = 0; j < profile.rank(); ++j)
        if (i != j && cross[i][j] < 0.0) rep.cross_negative_at_large_t = true;
  }
  return rep;
}

}  // namespace solitonforge::geometry
