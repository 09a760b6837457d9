#include "solitonforge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "solitonforge/error.hpp"

namespace solitonforge::verify {
namespace {

[[noreturn]] void fail(Errc code, const std::string& detail) { throw Error("verify", code, detail); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

Check make(std::string id, std::string name, std::string claim, double measured, double tol, bool passed,
           std::string detail = {}) {
  return Check{std::move(id), std::move(name), std::move(claim), measured, tol, passed, std::move(detail)};
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Gap from a limit to its target, inflated by the extrapolation's own error estimate.
double gap(const Extrapolation& e, double target) { return std::abs(e.limit - target) + e.error_estimate; }

}  // namespace

bool VerifyReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* VerifyReport::find(std::string_view id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids{"a", "b", "c", "d", "e", "f", "g", "decay", "h", "i", "j", "k",
                                            "conservation", "sectional", "decay_t", "paraboloid"};
  return ids;
}

Suite::Suite(const flow::Trajectory& traj, const reconstruct::MetricProfile& profile,
             const geometry::CurvatureReport& curv, const model::ProblemSpec& spec)
    : traj_(traj), profile_(profile), curv_(curv), spec_(spec) {
  if (traj.samples.size() < 3 || profile.rows.size() != traj.samples.size() ||
      curv.samples.size() != profile.rows.size() || profile.rank() != spec.rank())
    fail(Errc::IncompleteInputs, "trajectory, profile and curvature report must come from the same run");
  if (spec.mode != model::Mode::Soliton || traj.mode != model::Mode::Soliton)
    fail(Errc::IncompleteInputs, "the verification suite applies to soliton runs");
  c_ = model::constants(spec);
  const double b2 = c_.beta * c_.beta;
  const std::size_t r = spec.rank();

  ladder_ = reconstruct::seed_end_ladder(traj, spec, profile);
  bv_ = reconstruct::boundary_values(ladder_, r);
  std::vector<double> s_values;
  for (const auto& row : ladder_) s_values.push_back(row.s);
  const auto points = flow::dense_sample(traj, s_values);

  std::vector<std::vector<std::pair<double, double>>> ratio(r);
  std::vector<std::pair<double, double>> rho_pts, x1_pts, Ls_pts;
  for (std::size_t j = 0; j < ladder_.size(); ++j) {
    const auto& p = points[j];
    const double L = ladder_[j].L;
    double sum_x2 = 0.0;
    for (double x : p.X) sum_x2 += x * x;
    for (std::size_t i = 0; i < r; ++i) ratio[i].emplace_back(-L, p.X[i] / (p.Y[i] * p.Y[i]));
    rho_pts.emplace_back(-L, (sum_x2 + p.Y[0] * p.Y[0] - 1.0) / L);
    x1_pts.emplace_back(-L, (p.X[0] - c_.beta) / L);
    Ls_pts.emplace_back(-L, std::exp(-2.0 * b2 * p.s) * L);
  }
  for (std::size_t i = 0; i < r; ++i) {
    seed_ratio_.push_back(richardson_extrapolate(ratio[i]));
    diag_.seed_ratio_limits.push_back(seed_ratio_.back().limit);
    // Slope in L of the ratio at L = 0 from the two points closest to the seed.
    const auto& a = ratio[i][0];
    const auto& b = ratio[i][1];
    diag_.Q_limits.push_back(-(b.second - a.second) / (b.first - a.first));
  }
  rho_ = richardson_extrapolate(rho_pts);
  x1_ratio_ = richardson_extrapolate(x1_pts);
  L_scaled_ = richardson_extrapolate(Ls_pts);

  // Decay exponents over the part of the seed end where |L| stays below 5e-3.
  const auto decay = reconstruct::seed_end_ladder(traj, spec, profile, 8, 5e-3);
  std::vector<double> s_decay, logL;
  for (const auto& row : decay) {
    s_decay.push_back(row.s);
    logL.push_back(std::log(-row.L));
  }
  diag_.L_exponent = slope(s_decay, logL);
  const auto decay_points = flow::dense_sample(traj, s_decay);
  for (std::size_t i = 1; i < r; ++i) {
    std::vector<double> logY;
    for (const auto& p : decay_points) logY.push_back(std::log(p.Y[i]));
    diag_.Y_exponents.push_back(slope(s_decay, logY));
  }

  diag_.kappa = traj.kappa_estimate;
  diag_.rho_estimate = rho_.limit;
  diag_.x1_ratio_limit = x1_ratio_.limit;
  diag_.L_scaled_limit = L_scaled_.limit;
  for (std::size_t i = 0; i < r; ++i) {
    diag_.boundary_g.push_back(bv_.g[i].limit);
    diag_.boundary_g_dot.push_back(bv_.g_dot[i].limit);
    diag_.boundary_g_ddot.push_back(bv_.g_ddot[i].limit);
  }
  diag_.boundary_u_dot = bv_.u_dot.limit;
  diag_.boundary_u_ddot = bv_.u_ddot.limit;
  const auto lam = reconstruct::scale_limit(ladder_, c_.beta);
  diag_.scale_limit = lam.limit;
  diag_.u0_product = reconstruct::potential_at_collapse(profile, spec, bv_, lam.limit);
  diag_.u0_extrapolated = bv_.u.limit;

  try {
    asym_ = geometry::asymptotics(profile, spec);
  } catch (const Error& e) {
    asym_error_ = e.what();
  }
}

Check Suite::run(std::string_view id) const {
  if (id == "a") return lyapunov_monotone();
  if (id == "b") return origin_convergence();
  if (id == "c") return origin_ratio();
  if (id == "d") return seed_ratio();
  if (id == "e") return x1_below_beta();
  if (id == "f") return x1_lyapunov_ratio();
  if (id == "g") return lyapunov_growth();
  if (id == "decay") return decay_exponents();
  if (id == "h") return collapse_boundary();
  if (id == "i") return h_inequalities();
  if (id == "j") return ricci_and_residual();
  if (id == "k") return potential_product();
  if (id == "conservation") return conservation_identity();
  if (id == "sectional") return sectional_signs();
  if (id == "decay_t") return curvature_decay();
  if (id == "paraboloid") return paraboloid();
  fail(Errc::IncompleteInputs, "unknown check id '" + std::string(id) + "'");
}

Check Suite::lyapunov_monotone() const {
  const auto& smp = traj_.samples;
  std::string detail;
  double worst_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < smp.size(); ++k) {
    const auto& p = smp[k];
    if (detail.empty() && !(p.L < 0.0 && p.L > -1.0))
      detail = "L = " + fmt(p.L) + " outside (-1, 0) at s = " + fmt(p.s);
    for (std::size_t i = 0; i < p.Y.size() && detail.empty(); ++i)
      if (!(p.Y[i] > 0.0)) detail = "Y_" + std::to_string(i + 1) + " = " + fmt(p.Y[i]) + " <= 0 at s = " + fmt(p.s);
    if (k > 0) {
      const double inc = p.radius_sq - smp[k - 1].radius_sq;
      worst_increase = std::max(worst_increase, inc / smp[k - 1].radius_sq);
      if (detail.empty() && !(inc < 0.0)) detail = "L not strictly decreasing at s = " + fmt(p.s);
    }
  }
  return make("a", "lyapunov_monotone", "L strictly decreasing inside (-1, 0) with every Y_i > 0", worst_increase, 0.0,
              detail.empty(), detail);
}

Check Suite::origin_convergence() const {
  const auto& last = traj_.samples.back();
  const double dist = std::sqrt(last.radius_sq);
  const double dL = std::abs(last.L + 1.0);
  const double measured = std::max(dist, dL);
  return make("b", "origin_convergence", "terminal L = -1 and |(X, Y)| -> 0", measured, 1e-6, measured <= 1e-6,
              "|L + 1| = " + fmt(dL) + ", |(X, Y)| = " + fmt(dist));
}

Check Suite::origin_ratio() const {
  const auto& last = traj_.samples.back();
  double worst = 0.0;
  std::string detail;
  for (std::size_t i = 0; i < spec_.rank(); ++i) {
    const double v = last.X[i] / (last.Y[i] * last.Y[i]);
    const double target = 1.0 / traj_.sqrt_d[i];
    worst = std::max(worst, std::abs(v - target));
    detail += "X_" + std::to_string(i + 1) + "/Y^2 = " + fmt(v) + " (target " + fmt(target) + ") ";
  }
  return make("c", "origin_ratio_limit", "X_i / Y_i^2 -> 1/sqrt(d_i) at the origin", worst, 1e-4, worst <= 1e-4,
              detail);
}

Check Suite::seed_ratio() const {
  const double b2 = c_.beta * c_.beta;
  double worst = 0.0;
  std::string detail;
  for (std::size_t i = 1; i < spec_.rank(); ++i) {
    const double target = 1.0 / (traj_.sqrt_d[i] * (1.0 + b2));
    const double g = gap(seed_ratio_[i], target);
    worst = std::max(worst, g);
    detail += "X_" + std::to_string(i + 1) + "/Y^2 -> " + fmt(seed_ratio_[i].limit) + " +- " +
              fmt(seed_ratio_[i].error_estimate) + " (target " + fmt(target) + ") ";
  }
  if (spec_.rank() == 1) detail = "single factor: no i > 1";
  return make("d", "seed_ratio_limit", "X_i / Y_i^2 -> 1/(sqrt(d_i)(1 + beta^2)) at the seed end, i > 1", worst,
              1e-3, worst <= 1e-3, detail);
}

Check Suite::x1_below_beta() const {
  double worst = -std::numeric_limits<double>::infinity();
  double at = 0.0;
  for (const auto& p : traj_.samples)
    if (p.X[0] - c_.beta > worst) {
      worst = p.X[0] - c_.beta;
      at = p.s;
    }
  return make("e", "x1_below_beta", "X_1 < beta at every sample", worst, 0.0, worst < 0.0,
              "max X_1 - beta = " + fmt(worst) + " at s = " + fmt(at));
}

Check Suite::x1_lyapunov_ratio() const {
  const double b2 = c_.beta * c_.beta;
  const double target = c_.beta * rho_.limit / (1.0 + b2);
  const double g = gap(x1_ratio_, target) + c_.beta / (1.0 + b2) * rho_.error_estimate;
  return make("f", "x1_lyapunov_ratio", "(X_1 - beta)/L -> beta rho/(1 + beta^2)", g, 1e-3, g <= 1e-3,
              "limit " + fmt(x1_ratio_.limit) + ", rho " + fmt(rho_.limit) + ", target " + fmt(target));
}

Check Suite::lyapunov_growth() const {
  const double target = 2.0 * c_.beta * c_.beta;
  const double rel = std::abs(diag_.L_exponent - target) / target;
  const bool limit_ok = std::isfinite(L_scaled_.limit) && L_scaled_.limit < 0.0;
  return make("g", "lyapunov_growth_rate", "exp(-2 beta^2 s) L has a finite negative limit", rel, 0.02,
              rel <= 0.02 && limit_ok,
              "fitted exponent " + fmt(diag_.L_exponent) + " (target " + fmt(target) + "), limit " +
                  fmt(L_scaled_.limit));
}

Check Suite::decay_exponents() const {
  const double b2 = c_.beta * c_.beta;
  double worst = std::abs(diag_.L_exponent - 2.0 * b2) / (2.0 * b2);
  std::string detail = "L: " + fmt(diag_.L_exponent) + " ";
  for (std::size_t k = 0; k < diag_.Y_exponents.size(); ++k) {
    worst = std::max(worst, std::abs(diag_.Y_exponents[k] - b2) / b2);
    detail += "Y_" + std::to_string(k + 2) + ": " + fmt(diag_.Y_exponents[k]) + " ";
  }
  return make("decay", "seed_decay_exponents", "Y_i ~ exp(beta^2 s) and L ~ exp(2 beta^2 s) near the seed", worst,
              0.05, worst <= 0.05, detail);
}

Check Suite::collapse_boundary() const {
  struct Item {
    std::string what;
    double deviation;
    double tol;
  };
  std::vector<Item> items{{"g_1(0)", gap(bv_.g[0], 0.0), 1e-3},
                          {"g_dot_1(0) - 1", gap(bv_.g_dot[0], 1.0), 1e-3},
                          {"g_ddot_1(0)", gap(bv_.g_ddot[0], 0.0), 1e-2},
                          {"u_dot(0)", gap(bv_.u_dot, 0.0), 1e-3}};
  for (std::size_t i = 1; i < spec_.rank(); ++i)
    items.push_back({"g_dot_" + std::to_string(i + 1) + "(0)", gap(bv_.g_dot[i], 0.0), 1e-3});
  double worst = 0.0;
  std::string detail;
  bool ok = true;
  for (const auto& it : items) {
    worst = std::max(worst, it.deviation / it.tol);
    detail += it.what + ": " + fmt(it.deviation) + " ";
  }
  for (std::size_t i = 1; i < spec_.rank(); ++i) {
    const bool positive = bv_.g[i].limit > 0.0 && bv_.g[i].limit > bv_.g[i].error_estimate;
    ok = ok && positive && std::isfinite(bv_.g[i].limit);
    detail += "g_" + std::to_string(i + 1) + "(0) = " + fmt(bv_.g[i].limit) + " ";
  }
  for (const auto& e : bv_.g_ddot) ok = ok && std::isfinite(e.limit);
  ok = ok && std::isfinite(bv_.u_ddot.limit);
  detail += "u_ddot(0) = " + fmt(bv_.u_ddot.limit);
  return make("h", "collapse_boundary", "smooth collapse limits at t = 0", worst, 1.0, ok && worst <= 1.0, detail);
}

Check Suite::h_inequalities() const {
  double worst_H = -std::numeric_limits<double>::infinity();
  double worst_mix = -std::numeric_limits<double>::infinity();
  for (const auto& p : traj_.samples) {
    worst_H = std::max(worst_H, p.H - 1.0);
    // L + 1 - H = sum (X_i^2 - sqrt(d_i) G_i), evaluated without cancellation.
    double mix = 0.0;
    for (std::size_t i = 0; i < p.X.size(); ++i) mix += p.X[i] * p.X[i] - traj_.sqrt_d[i] * p.z(static_cast<Eigen::Index>(i));
    worst_mix = std::max(worst_mix, mix);
  }
  return make("i", "h_inequalities", "H < 1 and L + 1 - H < 0 at every sample", std::max(worst_H, worst_mix), 0.0,
              worst_H < 0.0 && worst_mix < 0.0, "max H - 1 = " + fmt(worst_H) + ", max L + 1 - H = " + fmt(worst_mix));
}

Check Suite::ricci_and_residual() const {
  const bool ok = curv_.min_ricci >= -1e-8 && curv_.soliton_residual_max <= 1e-6 && curv_.max_scalar_mismatch <= 1e-6;
  return make("j", "ricci_nonnegative", "Ric >= 0 and Ric + Hess u = 0", curv_.soliton_residual_max, 1e-6, ok,
              "min Ricci " + fmt(curv_.min_ricci) + ", residual " + fmt(curv_.soliton_residual_max) +
                  ", scalar mismatch " + fmt(curv_.max_scalar_mismatch));
}

Check Suite::potential_product() const {
  const double diff = std::abs(diag_.u0_product - diag_.u0_extrapolated) + bv_.u.error_estimate;
  const bool ok = std::isfinite(diag_.u0_product) && diff <= 1e-3;
  return make("k", "potential_at_collapse", "u(0) from the product formula matches the extrapolated u", diff, 1e-3,
              ok, "product " + fmt(diag_.u0_product) + ", extrapolated " + fmt(diag_.u0_extrapolated));
}

Check Suite::conservation_identity() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < profile_.rows.size(); ++k) {
    const auto& row = profile_.rows[k];
    const auto& p = traj_.samples[k];
    for (std::size_t i = 0; i < spec_.rank(); ++i) {
      const auto& f = spec_.factors[i];
      const double rhs = spec_.gauge_C / (f.dim * f.einstein_const) * row.g[i] * row.g[i] * p.Y[i] * p.Y[i];
      worst = std::max(worst, std::abs(row.L - rhs) / std::abs(row.L));
    }
  }
  return make("conservation", "conservation_identity", "L = C g_i^2 Y_i^2 / (d_i lambda_i)", worst, 1e-8,
              worst <= 1e-8);
}

Check Suite::sectional_signs() const {
  if (spec_.rank() >= 2) {
    const bool ok = asym_error_.empty() && asym_.cross_negative_at_large_t;
    return make("sectional", "sectional_signs", "some mixed 2-plane has negative curvature at large t",
                ok ? 1.0 : 0.0, 1.0, ok, asym_error_);
  }
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& cs : curv_.samples) {
    worst = std::min(worst, cs.sectional_mixed_t[0]);
    if (!std::isnan(cs.sectional_within_min[0])) worst = std::min(worst, cs.sectional_within_min[0]);
  }
  return make("sectional", "sectional_signs", "every sectional curvature positive", worst, 0.0, worst > 0.0);
}

Check Suite::curvature_decay() const {
  if (!asym_error_.empty()) return make("decay_t", "curvature_decay", "|K| and R decay like 1/t", 0, 0.1, false, asym_error_);
  const double dev = std::max(std::abs(asym_.K_slope + 1.0), std::abs(asym_.R_slope + 1.0));
  return make("decay_t", "curvature_decay", "|K| and R decay like 1/t and R t^2 grows without bound", dev, 0.1,
              dev <= 0.1 && asym_.R_t2_increasing && asym_.R_t_limit > 0.0,
              "K slope " + fmt(asym_.K_slope) + ", R slope " + fmt(asym_.R_slope) + ", R t " + fmt(asym_.R_t_limit));
}

Check Suite::paraboloid() const {
  if (!asym_error_.empty()) return make("paraboloid", "paraboloid_asymptotics", "g_i g_dot_i -> lambda_i/sqrt(-C)", 0, 1e-3, false, asym_error_);
  double worst_abs = 0.0, worst_rel = 0.0;
  std::string detail;
  for (std::size_t i = 0; i < spec_.rank(); ++i) {
    worst_abs = std::max(worst_abs, std::abs(asym_.g_gdot_limit[i] - asym_.g_gdot_target[i]) + asym_.g_gdot_error[i]);
    worst_rel = std::max(worst_rel, std::abs(asym_.g_sq_over_t[i] / asym_.g_sq_over_t_target[i] - 1.0));
    detail += "g gdot " + fmt(asym_.g_gdot_limit[i]) + ", g^2/t " + fmt(asym_.g_sq_over_t[i]) + "; ";
  }
  return make("paraboloid", "paraboloid_asymptotics", "g_i g_dot_i -> lambda_i/sqrt(-C), g_i^2/t -> 2 lambda_i/sqrt(-C)",
              worst_abs, 1e-3, worst_abs <= 1e-3 && worst_rel <= 1e-2, detail);
}

VerifyReport run_suite(const flow::Trajectory& traj, const reconstruct::MetricProfile& profile,
                       const geometry::CurvatureReport& curv, const model::ProblemSpec& spec) {
  const Suite suite(traj, profile, curv, spec);
  VerifyReport rep;
  for (const auto& id : check_ids()) rep.checks.push_back(suite.run(id));
  rep.diagnostics = suite.diagnostics();
  return rep;
}

}  // namespace solitonforge::verify
