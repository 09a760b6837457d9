#include "solitonforge/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "solitonforge/error.hpp"
#include "solitonforge/ode.hpp"
#include "solitonforge/phase.hpp"

namespace solitonforge::reconstruct {
namespace {

[[noreturn]] void fail(Errc code, const std::string& detail) { throw Error("reconstruct", code, detail); }

// Algebraic quantities at one adapted state.
struct Local {
  std::vector<double> X, Y, G;
  double S = 0.0;  // sum X^2
  double L = 0.0;
  double H = 0.0;
};

Local local_state(const Eigen::VectorXd& z, const std::vector<double>& sqrt_d) {
  Local out;
  phase::from_adapted(z, sqrt_d, out.X, out.Y);
  const std::size_t r = sqrt_d.size();
  out.G.resize(r);
  double radius_sq = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    out.G[i] = z(static_cast<Eigen::Index>(i));
    out.S += out.X[i] * out.X[i];
    radius_sq += out.X[i] * out.X[i] + out.Y[i] * out.Y[i];
    out.H += sqrt_d[i] * out.X[i];
  }
  out.L = radius_sq - 1.0;
  return out;
}

double soliton_scale(double L, double C) {
  if (!(L < 0.0)) fail(Errc::NonNegativeL, "L >= 0 on a soliton trajectory");
  return std::sqrt(L / C);
}

// Running integrals carried from sample to sample.
struct Accum {
  double t = 0.0;
  double u = 0.0;
  double log_scale = 0.0;  // Ricci-flat only
};

struct Context {
  const flow::Trajectory& traj;
  const model::ProblemSpec& spec;
  bool ricci_flat;
  double beta2;

  double scale_of(const Local& loc, double log_scale) const {
    return ricci_flat ? std::exp(log_scale) : soliton_scale(loc.L, spec.gauge_C);
  }

  // Integrals over [s_k, s_k + theta_end * h] of step k, five-point Gauss-Legendre.
  Accum partial(std::size_t k, double theta_end, const Accum& start) const {
    if (theta_end == 0.0) return start;
    const double h = traj.samples[k + 1].s - traj.samples[k].s;
    const double span = theta_end * h;
    Accum out = start;
    for (std::size_t q = 0; q < 5; ++q) {
      const double theta = theta_end * ode::GaussLegendre5::nodes[q];
      const double w = ode::GaussLegendre5::weights[q] * span;
      const Local loc = local_state(flow::dense_adapted(traj, k, theta), traj.sqrt_d);
      double log_scale = 0.0;
      if (ricci_flat) log_scale = log_scale_partial(k, theta, start.log_scale);
      out.t += w * scale_of(loc, log_scale);
      out.u += w * (loc.H - 1.0);
    }
    if (ricci_flat) out.log_scale = log_scale_partial(k, theta_end, start.log_scale);
    if (!std::isfinite(out.t) || !std::isfinite(out.u)) fail(Errc::QuadratureFailure, "non-finite quadrature");
    return out;
  }

  double log_scale_partial(std::size_t k, double theta_end, double start) const {
    const double h = traj.samples[k + 1].s - traj.samples[k].s;
    double acc = start;
    for (std::size_t q = 0; q < 5; ++q) {
      const Local loc = local_state(flow::dense_adapted(traj, k, theta_end * ode::GaussLegendre5::nodes[q]), traj.sqrt_d);
      acc += ode::GaussLegendre5::weights[q] * theta_end * h * loc.S;
    }
    return acc;
  }

  // Integral below the first sample. The scale obeys A' = A sum X^2 with
  // sum X^2 - beta^2 proportional to exp(2 beta^2 s) on the unstable manifold,
  // which integrates to A0/beta^2 (1 - (S0 - beta^2)/(3 beta^2)) to first order.
  double tail_t(const Local& first, double scale0) const {
    return scale0 / beta2 * (1.0 - (first.S - beta2) / (3.0 * beta2));
  }

  std::vector<Accum> cumulative() const {
    const auto& smp = traj.samples;
    std::vector<Accum> acc(smp.size());
    const Local first = local_state(smp.front().z, traj.sqrt_d);
    acc[0].t = tail_t(first, scale_of(first, 0.0));
    for (std::size_t k = 0; k + 1 < smp.size(); ++k) {
      acc[k + 1] = partial(k, 1.0, acc[k]);
      if (!(acc[k + 1].t > acc[k].t)) fail(Errc::QuadratureFailure, "arclength not increasing");
    }
    return acc;
  }

  ProfileRow row(double s, const Eigen::VectorXd& z, const Accum& a) const {
    const Local loc = local_state(z, traj.sqrt_d);
    const double A = scale_of(loc, a.log_scale);
    const std::size_t r = spec.rank();
    ProfileRow out;
    out.s = s;
    out.t = a.t;
    out.u = ricci_flat ? 0.0 : a.u;
    out.L = loc.L;
    out.H = loc.H;
    out.scale = A;
    out.g.resize(r);
    out.g_dot.resize(r);
    out.g_ddot.resize(r);
    out.g_dddot.resize(r);
    double sum_curv = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      const double d = spec.factors[i].dim;
      const double lam = spec.factors[i].einstein_const;
      const double sd = traj.sqrt_d[i];
      const double X = loc.X[i], Y = loc.Y[i], G = loc.G[i];
      if (Y == 0.0) fail(Errc::ZeroY, "Y_" + std::to_string(i + 1) + " = 0");
      const double g = std::sqrt(d * lam) * A / Y;
      // X^2 + Y^2 - sqrt(d) X, written without the cancellation between X and Y^2/sqrt(d).
      const double curv = (X * X - sd * G) / (d * A * A);
      out.g[i] = g;
      out.g_dot[i] = std::sqrt(lam) * X / Y;
      out.g_ddot[i] = g * curv;
      sum_curv += d * curv;
      const double F = X / (Y * Y);
      const double bracket = sd * G / (Y * Y) + F * (sd * loc.S - 3.0 * X + X * X / sd) + X / sd;
      out.g_dddot[i] = lam / (g * A) * bracket;
    }
    out.u_dot = (loc.H - 1.0) / A;
    out.u_ddot = sum_curv;
    return out;
  }
};

Context make_context(const flow::Trajectory& traj, const model::ProblemSpec& spec) {
  if (traj.samples.empty()) fail(Errc::QuadratureFailure, "empty trajectory");
  const auto c = model::constants(spec);
  return Context{traj, spec, spec.mode == model::Mode::RicciFlat, c.beta * c.beta};
}

}  // namespace

std::vector<double> arclength(const flow::Trajectory& traj, const model::ProblemSpec& spec) {
  const auto ctx = make_context(traj, spec);
  std::vector<double> t;
  for (const auto& a : ctx.cumulative()) t.push_back(a.t);
  return t;
}

Warping warping_functions(const flow::Trajectory& traj, const model::ProblemSpec& spec) {
  const auto profile = reconstruct(traj, spec);
  Warping w;
  for (const auto& row : profile.rows) {
    w.g.push_back(row.g);
    w.g_dot.push_back(row.g_dot);
    w.g_ddot.push_back(row.g_ddot);
  }
  return w;
}

std::vector<double> third_derivative(const flow::Trajectory& traj, const model::ProblemSpec& spec, std::size_t k) {
  const auto ctx = make_context(traj, spec);
  const auto acc = ctx.cumulative();
  return ctx.row(traj.samples.at(k).s, traj.samples.at(k).z, acc.at(k)).g_dddot;
}

Potential potential(const flow::Trajectory& traj, const model::ProblemSpec& spec) {
  const auto profile = reconstruct(traj, spec);
  Potential p;
  for (const auto& row : profile.rows) {
    p.u.push_back(row.u);
    p.u_dot.push_back(row.u_dot);
    p.u_ddot.push_back(row.u_ddot);
  }
  return p;
}

MetricProfile reconstruct(const flow::Trajectory& traj, const model::ProblemSpec& spec) {
  const auto ctx = make_context(traj, spec);
  const auto acc = ctx.cumulative();
  MetricProfile out;
  out.mode = spec.mode;
  out.gauge_C = spec.gauge_C;
  out.factors = spec.factors;
  out.u_gauge = ctx.ricci_flat ? "u = 0 (Ricci-flat)" : "u(s_0) = 0 at the first trajectory sample";
  out.rows.reserve(traj.samples.size());
  for (std::size_t k = 0; k < traj.samples.size(); ++k)
    out.rows.push_back(ctx.row(traj.samples[k].s, traj.samples[k].z, acc[k]));
  return out;
}

ProfileRow evaluate_at(const flow::Trajectory& traj, const model::ProblemSpec& spec, const MetricProfile& profile,
                       double s) {
  const auto ctx = make_context(traj, spec);
  const std::size_t k = flow::locate_step(traj, s);
  const auto& a = traj.samples[k];
  const auto& b = traj.samples[k + 1];
  const auto& base = profile.rows.at(k);
  Accum start{base.t, base.u, ctx.ricci_flat ? std::log(base.scale) : 0.0};
  if (s == a.s) return base;
  if (s == b.s) return profile.rows.at(k + 1);
  const double theta = (s - a.s) / (b.s - a.s);
  return ctx.row(s, flow::dense_adapted(traj, k, theta), ctx.partial(k, theta, start));
}

std::vector<ProfileRow> seed_end_ladder(const flow::Trajectory& traj, const model::ProblemSpec& spec,
                                        const MetricProfile& profile, std::size_t count, double max_abs_L) {
  if (traj.samples.size() < 2 || count < 3) fail(Errc::OutOfRange, "trajectory too short for a seed-end ladder");
  const auto c = model::constants(spec);
  const double b2 = c.beta * c.beta;
  // Off-manifold components of the seed decay relative to the unstable
  // directions at rate at least 1 + beta^2; wait three of those time units.
  const double s_lo = traj.s_front() + 3.0 / (1.0 + b2);
  double s_hi = s_lo;
  for (const auto& smp : traj.samples) {
    if (std::abs(smp.L) > max_abs_L) break;
    s_hi = smp.s;
  }
  if (!(s_hi > s_lo)) fail(Errc::OutOfRange, "seed too far from the critical point for a seed-end ladder");
  std::vector<ProfileRow> out;
  for (std::size_t j = 0; j < count; ++j) {
    const double s = s_lo + (s_hi - s_lo) * static_cast<double>(j) / static_cast<double>(count - 1);
    out.push_back(evaluate_at(traj, spec, profile, s));
  }
  return out;
}

BoundaryValues boundary_values(const std::vector<ProfileRow>& ladder, std::size_t rank) {
  using verify::Parity;
  auto series = [&](const std::function<double(const ProfileRow&)>& get, Parity parity) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : ladder) pts.emplace_back(row.t, get(row));
    return verify::richardson_extrapolate(pts, -1, parity);
  };
  BoundaryValues bv;
  for (std::size_t i = 0; i < rank; ++i) {
    // The collapsing factor is odd in t, the others even.
    const bool collapsing = i == 0;
    const Parity even = collapsing ? Parity::Odd : Parity::Even;
    const Parity odd = collapsing ? Parity::Even : Parity::Odd;
    bv.g.push_back(series([i](const ProfileRow& r) { return r.g[i]; }, even));
    bv.g_dot.push_back(series([i](const ProfileRow& r) { return r.g_dot[i]; }, odd));
    bv.g_ddot.push_back(series([i](const ProfileRow& r) { return r.g_ddot[i]; }, even));
    bv.g_dddot.push_back(series([i](const ProfileRow& r) { return r.g_dddot[i]; }, odd));
  }
  bv.u = series([](const ProfileRow& r) { return r.u; }, Parity::Even);
  bv.u_dot = series([](const ProfileRow& r) { return r.u_dot; }, Parity::Odd);
  bv.u_ddot = series([](const ProfileRow& r) { return r.u_ddot; }, Parity::Even);
  return bv;
}

verify::Extrapolation scale_limit(const std::vector<ProfileRow>& ladder, double beta) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : ladder) pts.emplace_back(-row.L, std::exp(-beta * beta * row.s) * row.scale);
  return verify::richardson_extrapolate(pts, -1, verify::Parity::None);
}

double potential_at_collapse(const MetricProfile& profile, const model::ProblemSpec& spec, const BoundaryValues& bv,
                             double scale_limit_value) {
  // u' = H - 1 = sum d_i (log g_i)' - 1 in s, and d_1 beta^2 = 1, so
  // u(s) - sum d_i log g_i(s) + s is constant along the trajectory.
  const auto c = model::constants(spec);
  const auto& first = profile.rows.front();
  double u0 = 0.0;
  for (std::size_t i = 1; i < spec.rank(); ++i)
    u0 += spec.factors[i].dim * std::log(bv.g[i].limit / first.g[i]);
  const double d1 = spec.factors[0].dim;
  const double g1_limit_coeff = std::sqrt(d1 * spec.factors[0].einstein_const) / c.beta_hat * scale_limit_value;
  u0 += d1 * std::log(g1_limit_coeff / (first.g[0] * std::exp(-c.beta * c.beta * first.s)));
  return u0;
}

}  // namespace solitonforge::reconstruct
