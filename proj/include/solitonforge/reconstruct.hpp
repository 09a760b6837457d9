#pragma once

#include <string>
#include <vector>

#include "solitonforge/flow.hpp"
#include "solitonforge/model.hpp"
#include "solitonforge/richardson.hpp"

namespace solitonforge::reconstruct {

/// Physical data at one value of s. All t-derivatives come from closed forms
/// in (X, Y, L); none is obtained by numerical differentiation.
struct ProfileRow {
  double s = 0.0;
  double t = 0.0;
  std::vector<double> g;
  std::vector<double> g_dot;
  std::vector<double> g_ddot;
  std::vector<double> g_dddot;
  double u = 0.0;
  double u_dot = 0.0;
  double u_ddot = 0.0;
  double L = 0.0;
  double H = 0.0;
  /// dt/ds; sqrt(L/C) for solitons, exp(int sum X^2 ds) normalised to 1 at the seed for Ricci-flat runs.
  double scale = 0.0;
};

struct MetricProfile {
  model::Mode mode = model::Mode::Soliton;
  double gauge_C = -1.0;
  std::vector<model::FactorSpec> factors;
  std::vector<ProfileRow> rows;
  std::string u_gauge;

  std::size_t rank() const noexcept { return factors.size(); }
};

/// t at every trajectory sample: t(s_0) = scale(s_0)/beta^2 (the tail below
/// the first sample, exact for a purely exponential scale) plus Gauss-Legendre
/// quadrature of the scale over the quintic dense output.
std::vector<double> arclength(const flow::Trajectory& traj, const model::ProblemSpec& spec);

struct Warping {
  std::vector<std::vector<double>> g, g_dot, g_ddot;  // indexed [sample][factor]
};

/// g_i = sqrt(d_i lambda_i) A / Y_i, g_dot_i = sqrt(lambda_i) X_i / Y_i and
/// g_ddot_i = g_i (X_i^2 + Y_i^2 - sqrt(d_i) X_i) / (d_i A^2) per trajectory sample.
Warping warping_functions(const flow::Trajectory& traj, const model::ProblemSpec& spec);

/// Third t-derivative of each g_i at sample k.
std::vector<double> third_derivative(const flow::Trajectory& traj, const model::ProblemSpec& spec, std::size_t k);

struct Potential {
  std::vector<double> u, u_dot, u_ddot;
};

/// u = int (H - 1) ds with u(s_0) = 0, u_dot = (H - 1)/A, u_ddot = sum d_i g_ddot_i / g_i.
Potential potential(const flow::Trajectory& traj, const model::ProblemSpec& spec);

/// Full profile, one row per trajectory sample.
MetricProfile reconstruct(const flow::Trajectory& traj, const model::ProblemSpec& spec);

/// Row at an arbitrary s inside the trajectory, from the dense output and
/// partial-step quadrature starting at the profile row of the enclosing step.
ProfileRow evaluate_at(const flow::Trajectory& traj, const model::ProblemSpec& spec, const MetricProfile& profile,
                       double s);

/// Rows on a geometric ladder in t near the collapse, between the end of the
/// seed transient and the point where |L| reaches max_abs_L.
std::vector<ProfileRow> seed_end_ladder(const flow::Trajectory& traj, const model::ProblemSpec& spec,
                                        const MetricProfile& profile, std::size_t count = 8,
                                        double max_abs_L = 0.03);

/// Extrapolated values at t = 0.
struct BoundaryValues {
  std::vector<verify::Extrapolation> g, g_dot, g_ddot, g_dddot;
  verify::Extrapolation u, u_dot, u_ddot;
};

BoundaryValues boundary_values(const std::vector<ProfileRow>& ladder, std::size_t rank);

/// lim_{s -> -inf} exp(-beta^2 s) A(s), extrapolated linearly in L along the ladder.
verify::Extrapolation scale_limit(const std::vector<ProfileRow>& ladder, double beta);

/// u(0) in the gauge u(s_0) = 0, from the limits of g_i at t = 0 and of
/// exp(-beta^2 s) A; finite whenever those limits are.
double potential_at_collapse(const MetricProfile& profile, const model::ProblemSpec& spec,
                             const BoundaryValues& bv, double scale_limit_value);

}  // namespace solitonforge::reconstruct
