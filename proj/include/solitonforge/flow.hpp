#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string_view>
#include <vector>

#include "solitonforge/model.hpp"

namespace solitonforge::flow {

/// Accepted integration state. Besides (X, Y) every sample carries the
/// adapted coordinates z = (G, Y) with G_i = X_i - Y_i^2/sqrt(d_i) and the
/// first two s-derivatives of z, which drive the quintic dense output.
struct Sample {
  double s = 0.0;
  std::vector<double> X;
  std::vector<double> Y;
  Eigen::VectorXd z;
  Eigen::VectorXd dz;
  Eigen::VectorXd ddz;
  double L = 0.0;
  double H = 0.0;
  double radius_sq = 0.0;  // sum X^2 + sum Y^2 = L + 1, kept separately for precision near the origin
};

enum class Termination {
  ReachedOrigin,  // |(X, Y)| < origin_tol
  ReachedSMax,
  RestPoint,      // vector field below origin_tol (Ricci-flat runs settle on a cone point)
  Stationary,     // started on the critical point
};

std::string_view termination_name(Termination t) noexcept;

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t explicit_steps = 0;
  std::size_t implicit_steps = 0;
  /// s at which stiffness was detected and the implicit method took over (valid if switched).
  double stiff_switch_s = 0.0;
  bool switched = false;
  /// Largest |L| and |H - 1| after projection (Ricci-flat runs only).
  double max_constraint_drift = 0.0;
};

struct Trajectory {
  model::Mode mode = model::Mode::Soliton;
  std::vector<Sample> samples;
  std::vector<double> sqrt_d;
  Termination termination = Termination::ReachedSMax;
  StepStats stats;
  double kappa_estimate = 0.0;  // terminal L

  PhasePoint point(std::size_t k) const;
  double s_front() const { return samples.front().s; }
  double s_back() const { return samples.back().s; }
};

/// Initial point on the unstable manifold of the critical point.
///
/// Soliton mode: critical_point + eps0 * (2 beta, beta_hat) in (X_1, Y_1) and
/// eps_k in Y_k, plus (seed_order 2) the quadratic manifold correction
/// X_k = eps_k^2 / (sqrt(d_k)(1 + beta^2)). Ricci-flat mode: the perturbed
/// point is projected onto {L = 0, H = 1}.
PhasePoint seed(const model::ProblemSpec& spec);

Trajectory integrate(const model::ProblemSpec& spec, const PhasePoint& seed);

/// Interpolated states from the quintic dense output. Throws OutOfRange
/// outside [s_front, s_back].
std::vector<PhasePoint> dense_sample(const Trajectory& traj, const std::vector<double>& s_values);

/// Adapted state on step k (between samples k and k+1) at fraction theta.
Eigen::VectorXd dense_adapted(const Trajectory& traj, std::size_t k, double theta);

/// Index k with samples[k].s <= s <= samples[k+1].s.
std::size_t locate_step(const Trajectory& traj, double s);

/// Derivative of the adapted coordinates, exposed for oracles in tests.
Eigen::VectorXd adapted_rhs(const Trajectory& traj, const Eigen::VectorXd& z);

}  // namespace solitonforge::flow
