#include "solitonforge/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "solitonforge/error.hpp"
#include "solitonforge/ode.hpp"

namespace solitonforge::oracle {
namespace {

[[noreturn]] void fail(Errc code, const std::string& detail) { throw Error("oracle", code, detail); }

ode::Vec pack(const SecondOrderState& s) {
  const auto r = static_cast<Eigen::Index>(s.g.size());
  ode::Vec y(2 * r + 1);
  for (Eigen::Index i = 0; i < r; ++i) {
    y(i) = s.g[i];
    y(r + i) = s.g_dot[i];
  }
  y(2 * r) = s.u_dot;
  return y;
}

SecondOrderState unpack(double t, const ode::Vec& y) {
  const auto r = (y.size() - 1) / 2;
  SecondOrderState s;
  s.t = t;
  for (Eigen::Index i = 0; i < r; ++i) {
    s.g.push_back(y(i));
    s.g_dot.push_back(y(r + i));
  }
  s.u_dot = y(2 * r);
  return s;
}

SecondOrderSample make_sample(const SecondOrderState& s, const std::vector<model::FactorSpec>& factors) {
  SecondOrderSample out;
  out.state = s;
  second_derivatives(s, factors, out.g_ddot, out.u_ddot);
  out.conservation = conservation_quantity(s, factors);
  return out;
}

// Value of a field at t from oracle samples, cubic Hermite between neighbours.
template <class Value, class Deriv>
double interpolate(const std::vector<SecondOrderSample>& b, std::size_t k, double t, Value value, Deriv deriv) {
  const auto& p = b[k];
  const auto& q = b[k + 1];
  const double h = q.state.t - p.state.t;
  return ode::hermite_cubic(value(p), deriv(p), value(q), deriv(q), h, (t - p.state.t) / h);
}

}  // namespace

void second_derivatives(const SecondOrderState& s, const std::vector<model::FactorSpec>& factors,
                        std::vector<double>& g_ddot, double& u_ddot) {
  const std::size_t r = factors.size();
  double tr = 0.0;
  for (std::size_t i = 0; i < r; ++i) tr += factors[i].dim * s.g_dot[i] / s.g[i];
  g_ddot.resize(r);
  u_ddot = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    const double l = s.g_dot[i] / s.g[i];
    const double ratio = factors[i].einstein_const / (s.g[i] * s.g[i]) - tr * l + l * l + s.u_dot * l;
    g_ddot[i] = s.g[i] * ratio;
    u_ddot += factors[i].dim * ratio;
  }
}

double conservation_quantity(const SecondOrderState& s, const std::vector<model::FactorSpec>& factors) {
  double tr = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const double d = factors[i].dim;
    const double l = s.g_dot[i] / s.g[i];
    tr += d * l;
    acc += d * factors[i].einstein_const / (s.g[i] * s.g[i]) + d * l * l;
  }
  const double w = s.u_dot - tr;
  return acc - w * w;
}

SecondOrderState init_from_profile(const reconstruct::MetricProfile& profile, double t0) {
  const auto& rows = profile.rows;
  if (rows.size() < 2 || !(t0 > 0.0) || !(t0 >= rows.front().t) || !(t0 <= rows.back().t))
    fail(Errc::OutOfRange, "t0 = " + std::to_string(t0) + " outside the profile's t-range");
  auto it = std::lower_bound(rows.begin(), rows.end(), t0,
                             [](const reconstruct::ProfileRow& row, double t) { return row.t < t; });
  SecondOrderState s;
  s.t = t0;
  if (it->t == t0) {
    s.g = it->g;
    s.g_dot = it->g_dot;
    s.u_dot = it->u_dot;
    return s;
  }
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double h = b.t - a.t;
  const double theta = (t0 - a.t) / h;
  for (std::size_t i = 0; i < profile.rank(); ++i) {
    s.g.push_back(ode::hermite_quintic(a.g[i], a.g_dot[i], a.g_ddot[i], b.g[i], b.g_dot[i], b.g_ddot[i], h, theta));
    s.g_dot.push_back(
        ode::hermite_quintic(a.g_dot[i], a.g_ddot[i], a.g_dddot[i], b.g_dot[i], b.g_ddot[i], b.g_dddot[i], h, theta));
  }
  s.u_dot = ode::hermite_cubic(a.u_dot, a.u_ddot, b.u_dot, b.u_ddot, h, theta);
  return s;
}

std::vector<SecondOrderSample> integrate_second_order(const SecondOrderState& state, const model::ProblemSpec& spec,
                                                      double t_end, const std::vector<double>& output_times,
                                                      const OracleControls& controls) {
  const auto& factors = spec.factors;
  const std::size_t r = factors.size();
  if (state.g.size() != r || state.g_dot.size() != r)
    fail(Errc::OutOfRange, "state does not match the number of factors");
  if (!(t_end > state.t)) fail(Errc::OutOfRange, "t_end must exceed the initial t");

  const ode::RhsFn f = [&factors, r](const ode::Vec& y, ode::Vec& dy) {
    const auto s = unpack(0.0, y);
    std::vector<double> gdd;
    double udd;
    second_derivatives(s, factors, gdd, udd);
    dy.resize(y.size());
    for (std::size_t i = 0; i < r; ++i) {
      dy(static_cast<Eigen::Index>(i)) = s.g_dot[i];
      dy(static_cast<Eigen::Index>(r + i)) = gdd[i];
    }
    dy(static_cast<Eigen::Index>(2 * r)) = udd;
  };
  const auto norm = ode::scalar_tolerance_norm(controls.abs_tol, controls.rel_tol);

  std::vector<double> targets;
  for (double t : output_times)
    if (t > state.t && t <= t_end) targets.push_back(t);
  std::sort(targets.begin(), targets.end());
  const bool every_step = targets.empty();
  if (every_step || targets.back() != t_end) targets.push_back(t_end);

  std::vector<SecondOrderSample> out{make_sample(state, factors)};
  ode::Vec y = pack(state);
  ode::Vec fy;
  f(y, fy);
  double t = state.t;
  double h = controls.initial_step;
  ode::StepController ctl(5);
  std::size_t steps = 0;
  std::size_t next = 0;
  while (next < targets.size()) {
    if (++steps > controls.max_steps) fail(Errc::StepLimitExceeded, "oracle step budget exhausted");
    const double target = targets[next];
    const bool hits = t + h >= target;
    const double step = hits ? target - t : h;
    auto res = ode::dormand_prince_step(f, y, fy, step, norm);
    const bool ok = res.error_norm <= 1.0;
    const double proposed = ctl.propose(step, res.error_norm, ok);
    if (!ok) {
      h = proposed;
      if (h < 1e-15 * std::max(1.0, std::abs(t))) fail(Errc::BlowUp, "step size underflow at t = " + std::to_string(t));
      continue;
    }
    if (!hits) h = proposed;
    t = hits ? target : t + step;
    y = std::move(res.y);
    fy = std::move(res.f);
    for (std::size_t i = 0; i < r; ++i) {
      const double g = y(static_cast<Eigen::Index>(i));
      if (!(g > 0.0) || !std::isfinite(g) || g > 1e150)
        fail(Errc::BlowUp, "g_" + std::to_string(i + 1) + " left (0, inf) at t = " + std::to_string(t));
    }
    if (hits) ++next;
    if (hits || every_step) out.push_back(make_sample(unpack(t, y), factors));
  }
  return out;
}

double Deviation::max() const { return std::max({g, g_dot, u_dot}); }

Deviation compare_profiles(const reconstruct::MetricProfile& a, const std::vector<SecondOrderSample>& b) {
  if (b.size() < 2) fail(Errc::NoOverlap, "oracle run has fewer than two samples");
  const double lo = b.front().state.t, hi = b.back().state.t;
  const std::size_t r = a.rank();
  for (const auto& x : b)
    if (x.state.g.size() != r || x.state.g_dot.size() != r || x.g_ddot.size() != r)
      fail(Errc::LengthMismatch, "oracle sample does not match the number of factors");
  std::vector<double> g_scale(r, 0.0), gd_scale(r, 0.0);
  double ud_scale = 0.0;
  std::vector<std::vector<double>> dg(r), dgd(r);
  std::vector<double> dud;
  std::size_t k = 0;
  for (const auto& row : a.rows) {
    if (row.t < lo || row.t > hi) continue;
    while (k + 2 < b.size() && b[k + 1].state.t < row.t) ++k;
    for (std::size_t i = 0; i < r; ++i) {
      const double g = interpolate(
          b, k, row.t, [i](const SecondOrderSample& x) { return x.state.g[i]; },
          [i](const SecondOrderSample& x) { return x.state.g_dot[i]; });
      const double gd = interpolate(
          b, k, row.t, [i](const SecondOrderSample& x) { return x.state.g_dot[i]; },
          [i](const SecondOrderSample& x) { return x.g_ddot[i]; });
      dg[i].push_back(std::abs(g - row.g[i]));
      dgd[i].push_back(std::abs(gd - row.g_dot[i]));
      g_scale[i] = std::max(g_scale[i], std::abs(row.g[i]));
      gd_scale[i] = std::max(gd_scale[i], std::abs(row.g_dot[i]));
    }
    const double ud = interpolate(
        b, k, row.t, [](const SecondOrderSample& x) { return x.state.u_dot; },
        [](const SecondOrderSample& x) { return x.u_ddot; });
    dud.push_back(std::abs(ud - row.u_dot));
    ud_scale = std::max(ud_scale, std::abs(row.u_dot));
  }
  if (dud.empty()) fail(Errc::NoOverlap, "profile and oracle t-ranges do not overlap");
  Deviation dev;
  dev.compared = dud.size();
  auto worst = [](const std::vector<double>& v, double scale) {
    const double m = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    return scale > 0.0 ? m / scale : m;
  };
  for (std::size_t i = 0; i < r; ++i) {
    dev.g = std::max(dev.g, worst(dg[i], g_scale[i]));
    dev.g_dot = std::max(dev.g_dot, worst(dgd[i], gd_scale[i]));
  }
  dev.u_dot = worst(dud, ud_scale);
  return dev;
}

CrossValidation cross_validate(const reconstruct::MetricProfile& profile, const model::ProblemSpec& spec,
                               double t0_factor, double decades, const OracleControls& controls) {
  const auto& rows = profile.rows;
  if (rows.size() < 3) fail(Errc::NoOverlap, "profile too short for cross-validation");
  const double wanted = t0_factor * rows.front().t;
  auto it = std::min_element(rows.begin(), rows.end(), [wanted](const auto& x, const auto& y) {
    return std::abs(std::log(x.t / wanted)) < std::abs(std::log(y.t / wanted));
  });
  CrossValidation cv;
  cv.t0 = it->t;
  // Output at every row up to the first one at least `decades` decades beyond t0.
  const double target = cv.t0 * std::pow(10.0, decades);
  std::vector<double> times;
  for (const auto& row : rows) {
    if (row.t <= cv.t0) continue;
    times.push_back(row.t);
    if (row.t >= target) break;
  }
  if (times.empty()) fail(Errc::NoOverlap, "no profile rows after t0");
  cv.t_end = times.back();
  const auto start = init_from_profile(profile, cv.t0);
  const auto run = integrate_second_order(start, spec, cv.t_end, times, controls);
  cv.deviation = compare_profiles(profile, run);
  cv.conservation_initial = run.front().conservation;
  for (const auto& smp : run)
    cv.conservation_drift = std::max(cv.conservation_drift, std::abs(smp.conservation - cv.conservation_initial));
  return cv;
}

}  // namespace solitonforge::oracle
