#include "solitonforge/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "solitonforge/error.hpp"
#include "solitonforge/ode.hpp"
#include "solitonforge/phase.hpp"

namespace solitonforge::flow {
namespace {

[[noreturn]] void fail(Errc code, const std::string& detail) { throw Error("flow", code, detail); }

std::string at_s(double s) {
  std::ostringstream os;
  os.precision(17);
  os << " at s = " << s;
  return os.str();
}

// Newton projection onto {sum X^2 + sum Y^2 = 1, sum sqrt(d_i) X_i = 1} with
// minimum-norm corrections.
void project_ricci_flat(std::vector<double>& X, std::vector<double>& Y, const std::vector<double>& sqrt_d) {
  const std::size_t r = X.size();
  for (int iter = 0; iter < 50; ++iter) {
    double c1 = -1.0, c2 = -1.0;
    for (std::size_t i = 0; i < r; ++i) {
      c1 += X[i] * X[i] + Y[i] * Y[i];
      c2 += sqrt_d[i] * X[i];
    }
    if (std::abs(c1) < 1e-15 && std::abs(c2) < 1e-15) return;
    Eigen::MatrixXd J(2, 2 * r);
    for (std::size_t i = 0; i < r; ++i) {
      J(0, i) = 2.0 * X[i];
      J(0, r + i) = 2.0 * Y[i];
      J(1, i) = sqrt_d[i];
      J(1, r + i) = 0.0;
    }
    const Eigen::Matrix2d JJt = J * J.transpose();
    const Eigen::Vector2d lam = JJt.ldlt().solve(Eigen::Vector2d(c1, c2));
    const Eigen::VectorXd delta = J.transpose() * lam;
    for (std::size_t i = 0; i < r; ++i) {
      X[i] -= delta(i);
      Y[i] -= delta(r + i);
    }
  }
}

struct Evaluator {
  std::vector<double> sqrt_d;

  void rhs(const Eigen::VectorXd& z, Eigen::VectorXd& dz) const { phase::adapted_field(z, sqrt_d, dz); }
  void jac(const Eigen::VectorXd& z, Eigen::MatrixXd& J) const { phase::adapted_jacobian(z, sqrt_d, J); }

  Sample make_sample(double s, const Eigen::VectorXd& z) const {
    Sample out;
    out.s = s;
    out.z = z;
    phase::from_adapted(z, sqrt_d, out.X, out.Y);
    rhs(z, out.dz);
    Eigen::MatrixXd J;
    jac(z, J);
    out.ddz = J * out.dz;
    out.radius_sq = 0.0;
    out.H = 0.0;
    for (std::size_t i = 0; i < sqrt_d.size(); ++i) {
      out.radius_sq += out.X[i] * out.X[i] + out.Y[i] * out.Y[i];
      out.H += sqrt_d[i] * out.X[i];
    }
    out.L = out.radius_sq - 1.0;
    return out;
  }

  // Error weights relative to the natural size of each adapted coordinate:
  // |Y_i| for Y_i and Y_i^4 / d_i^(3/2) for G_i (the slow-manifold scale of G near the origin).
  ode::NormFn norm(double abs_tol, double rel_tol) const {
    return [this, abs_tol, rel_tol](const Eigen::VectorXd& err, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      const auto r = static_cast<Eigen::Index>(sqrt_d.size());
      double acc = 0.0;
      for (Eigen::Index k = 0; k < 2 * r; ++k) {
        double natural;
        if (k < r) {
          const double y = std::max(std::abs(a(r + k)), std::abs(b(r + k)));
          const double d = sqrt_d[k] * sqrt_d[k];
          natural = y * y * y * y / (d * sqrt_d[k]);
        } else {
          natural = std::max(std::abs(a(k)), std::abs(b(k)));
        }
        const double scale = std::max({std::abs(a(k)), std::abs(b(k)), natural});
        const double w = rel_tol * scale + abs_tol * natural;
        const double q = w > 0.0 ? err(k) / w : (err(k) == 0.0 ? 0.0 : INFINITY);
        acc += q * q;
      }
      return std::sqrt(acc / static_cast<double>(2 * r));
    };
  }
};

// The explicit pair becomes accuracy-limited by the relaxing fast mode long
// before it hits its stability boundary (h rho ~ 3.3), so the hand-over to
// the implicit method happens once steps reach the fast time scale.
constexpr double kStiffHRho = 1.0;
constexpr int kStiffConfirmations = 15;

void check_soliton_invariants(const Sample& prev, const Sample& next) {
  for (std::size_t i = 0; i < next.Y.size(); ++i)
    if (!(next.Y[i] > 0.0))
      fail(Errc::InvariantViolated, "Y_" + std::to_string(i + 1) + " > 0 violated" + at_s(next.s));
  if (!(next.L < 0.0)) fail(Errc::InvariantViolated, "L < 0 violated" + at_s(next.s));
  if (!(next.radius_sq <= prev.radius_sq * (1.0 + 4e-16)))
    fail(Errc::InvariantViolated, "L decreasing violated" + at_s(next.s));
}

}  // namespace

std::string_view termination_name(Termination t) noexcept {
  switch (t) {
    case Termination::ReachedOrigin: return "ReachedOrigin";
    case Termination::ReachedSMax: return "ReachedSMax";
    case Termination::RestPoint: return "RestPoint";
    case Termination::Stationary: return "Stationary";
  }
  return "Unknown";
}

PhasePoint Trajectory::point(std::size_t k) const {
  const auto& smp = samples.at(k);
  return PhasePoint{smp.s, smp.X, smp.Y};
}

PhasePoint seed(const model::ProblemSpec& spec) {
  if (spec.seed_coeffs.size() != spec.rank())
    fail(Errc::LengthMismatch, "seed_coeffs must have one entry per factor");
  const auto c = model::constants(spec);
  const double b2 = c.beta * c.beta;
  PhasePoint p = model::critical_point(spec);
  const auto& eps = spec.seed_coeffs;
  const bool trivial = std::all_of(eps.begin(), eps.end(), [](double e) { return e == 0.0; });
  if (trivial) return p;

  p.X[0] += eps[0] * 2.0 * c.beta;
  p.Y[0] += eps[0] * c.beta_hat;
  const auto sqrt_d = phase::sqrt_dims(spec);
  for (std::size_t k = 1; k < spec.rank(); ++k) {
    p.Y[k] = eps[k];
    if (spec.seed_order == 2) p.X[k] = eps[k] * eps[k] / (sqrt_d[k] * (1.0 + b2));
  }

  if (spec.mode == model::Mode::RicciFlat) {
    project_ricci_flat(p.X, p.Y, sqrt_d);
    return p;
  }
  if (!(phase::lyapunov(p) < 0.0))
    fail(Errc::SeedLeavesWrongRegion, "seed has L >= 0; eps0 must be negative");
  for (std::size_t i = 0; i < p.Y.size(); ++i)
    if (!(p.Y[i] > 0.0)) fail(Errc::NonPositiveY, "seed has Y_" + std::to_string(i + 1) + " <= 0");
  return p;
}

Eigen::VectorXd adapted_rhs(const Trajectory& traj, const Eigen::VectorXd& z) {
  Eigen::VectorXd dz;
  phase::adapted_field(z, traj.sqrt_d, dz);
  return dz;
}

Trajectory integrate(const model::ProblemSpec& spec, const PhasePoint& start) {
  if (start.X.size() != spec.rank() || start.Y.size() != spec.rank())
    fail(Errc::LengthMismatch, "seed does not match the number of factors");
  Evaluator ev{phase::sqrt_dims(spec)};
  Trajectory traj;
  traj.mode = spec.mode;
  traj.sqrt_d = ev.sqrt_d;

  const bool ricci_flat = spec.mode == model::Mode::RicciFlat;
  const auto& ctl = spec.step;
  const auto norm = ev.norm(ctl.abs_tol, ctl.rel_tol);
  const ode::RhsFn f = [&ev](const ode::Vec& z, ode::Vec& dz) { ev.rhs(z, dz); };
  const ode::JacFn jac = [&ev](const ode::Vec& z, ode::Mat& J) { ev.jac(z, J); };

  traj.samples.push_back(ev.make_sample(start.s, phase::to_adapted(start, ev.sqrt_d)));
  if (traj.samples.back().dz.lpNorm<Eigen::Infinity>() <= 1e-14) {
    traj.termination = Termination::Stationary;
    traj.kappa_estimate = traj.samples.back().L;
    return traj;
  }

  ode::StepController explicit_ctl(5);
  ode::StepController implicit_ctl(6, 0.0, 0.9, 0.2, 8.0);
  bool stiff = false;
  int stiff_count = 0, calm_count = 0;
  double h = std::min(ctl.initial_step, spec.s_max - start.s);
  std::size_t attempts = 0;

  for (;;) {
    const Sample& cur = traj.samples.back();
    if (traj.stats.accepted >= ctl.max_steps || attempts >= 4 * ctl.max_steps)
      fail(Errc::StepLimitExceeded, "step budget of " + std::to_string(ctl.max_steps) + " exhausted" + at_s(cur.s));
    if (h <= 1e-14 * std::max(1.0, std::abs(cur.s)))
      fail(Errc::StepLimitExceeded, "step size underflow" + at_s(cur.s));
    const double remaining = spec.s_max - cur.s;
    const bool last = h >= remaining;
    const double step = last ? remaining : h;
    ++attempts;

    ode::Vec z_new;
    double err;
    bool ok;
    const bool implicit_step = stiff;
    if (!implicit_step) {
      auto res = ode::dormand_prince_step(f, cur.z, cur.dz, step, norm);
      err = res.error_norm;
      ok = err <= 1.0;
      if (ok) {
        z_new = std::move(res.y);
        if (res.stiffness_h_rho > kStiffHRho) {
          calm_count = 0;
          if (++stiff_count >= kStiffConfirmations) {
            stiff = true;
            traj.stats.switched = true;
            traj.stats.stiff_switch_s = cur.s + step;
          }
        } else if (++calm_count >= 6) {
          stiff_count = 0;
        }
      }
      h = explicit_ctl.propose(step, err, ok);
    } else {
      auto res = ode::radau_step(f, jac, cur.z, step, norm);
      err = res.converged ? res.error_norm : INFINITY;
      ok = res.converged && err <= 1.0;
      if (ok) z_new = std::move(res.y);
      h = res.converged ? implicit_ctl.propose(step, err, ok) : 0.5 * step;
    }
    if (!ok) {
      ++traj.stats.rejected;
      continue;
    }

    if (ricci_flat) {
      std::vector<double> X, Y;
      phase::from_adapted(z_new, ev.sqrt_d, X, Y);
      project_ricci_flat(X, Y, ev.sqrt_d);
      z_new = phase::to_adapted(PhasePoint{0.0, X, Y}, ev.sqrt_d);
    }
    Sample next = ev.make_sample(last ? spec.s_max : cur.s + step, z_new);
    if (ricci_flat) {
      traj.stats.max_constraint_drift =
          std::max({traj.stats.max_constraint_drift, std::abs(next.L), std::abs(next.H - 1.0)});
    } else {
      check_soliton_invariants(cur, next);
    }
    ++traj.stats.accepted;
    ++(implicit_step ? traj.stats.implicit_steps : traj.stats.explicit_steps);
    traj.samples.push_back(std::move(next));

    const Sample& now = traj.samples.back();
    if (!ricci_flat && std::sqrt(now.radius_sq) < spec.origin_tol) {
      traj.termination = Termination::ReachedOrigin;
      break;
    }
    if (ricci_flat && now.dz.lpNorm<Eigen::Infinity>() < spec.origin_tol) {
      traj.termination = Termination::RestPoint;
      break;
    }
    if (last) {
      traj.termination = Termination::ReachedSMax;
      break;
    }
  }
  traj.kappa_estimate = traj.samples.back().L;
  return traj;
}

std::size_t locate_step(const Trajectory& traj, double s) {
  const auto& smp = traj.samples;
  if (smp.size() < 2 || !(s >= smp.front().s) || !(s <= smp.back().s))
    fail(Errc::OutOfRange, "s outside the integrated range" + at_s(s));
  auto it = std::upper_bound(smp.begin(), smp.end(), s, [](double v, const Sample& x) { return v < x.s; });
  auto k = static_cast<std::size_t>(it - smp.begin());
  return k == 0 ? 0 : std::min(k - 1, smp.size() - 2);
}

Eigen::VectorXd dense_adapted(const Trajectory& traj, std::size_t k, double theta) {
  const auto& a = traj.samples.at(k);
  const auto& b = traj.samples.at(k + 1);
  return ode::hermite_quintic(a.z, a.dz, a.ddz, b.z, b.dz, b.ddz, b.s - a.s, theta);
}

std::vector<PhasePoint> dense_sample(const Trajectory& traj, const std::vector<double>& s_values) {
  std::vector<PhasePoint> out;
  out.reserve(s_values.size());
  for (double s : s_values) {
    if (traj.samples.size() == 1 && s == traj.samples.front().s) {
      out.push_back(traj.point(0));
      continue;
    }
    const std::size_t k = locate_step(traj, s);
    const auto& a = traj.samples[k];
    const auto& b = traj.samples[k + 1];
    if (s == a.s) {
      out.push_back(traj.point(k));
    } else if (s == b.s) {
      out.push_back(traj.point(k + 1));
    } else {
      PhasePoint p;
      p.s = s;
      phase::from_adapted(dense_adapted(traj, k, (s - a.s) / (b.s - a.s)), traj.sqrt_d, p.X, p.Y);
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace solitonforge::flow
