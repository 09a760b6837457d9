#pragma once

#include <vector>

#include "solitonforge/model.hpp"
#include "solitonforge/reconstruct.hpp"

namespace solitonforge::oracle {

/// State of the second-order system in t. u itself never enters the
/// equations, only u_dot.
struct SecondOrderState {
  double t = 0.0;
  std::vector<double> g;
  std::vector<double> g_dot;
  double u_dot = 0.0;
};

struct SecondOrderSample {
  SecondOrderState state;
  std::vector<double> g_ddot;
  double u_ddot = 0.0;
  double conservation = 0.0;
};

/// g, g_dot, u_dot of the profile at t0 (Hermite interpolation between rows
/// using the closed-form higher derivatives). Throws OutOfRange unless t0 lies
/// inside the profile's t-range; t0 = 0 is never accepted.
SecondOrderState init_from_profile(const reconstruct::MetricProfile& profile, double t0);

/// g_ddot_i / g_i = lambda_i / g_i^2 - trL g_dot_i / g_i + (g_dot_i / g_i)^2 + u_dot g_dot_i / g_i,
/// u_ddot = sum d_i g_ddot_i / g_i.
void second_derivatives(const SecondOrderState& s, const std::vector<model::FactorSpec>& factors,
                        std::vector<double>& g_ddot, double& u_ddot);

/// sum d_i lambda_i / g_i^2 + sum d_i (g_dot_i / g_i)^2 - (u_dot - trL)^2; equals C on soliton solutions.
double conservation_quantity(const SecondOrderState& s, const std::vector<model::FactorSpec>& factors);

struct OracleControls {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double initial_step = 1e-4;
  std::size_t max_steps = 1000000;
};

/// Adaptive Dormand-Prince integration of the second-order system up to t_end.
/// Samples are produced at every time in output_times that lies in
/// (state.t, t_end] (hit exactly), or at every accepted step when
/// output_times is empty. The first sample is the initial state.
std::vector<SecondOrderSample> integrate_second_order(const SecondOrderState& state, const model::ProblemSpec& spec,
                                                      double t_end, const std::vector<double>& output_times = {},
                                                      const OracleControls& controls = {});

/// Max deviation per field over the common t-range, each normalised by the
/// largest magnitude of that field in the window so that quantities passing
/// through zero are compared on their natural scale.
struct Deviation {
  double g = 0.0;
  double g_dot = 0.0;
  double u_dot = 0.0;
  std::size_t compared = 0;
  double max() const;
};

Deviation compare_profiles(const reconstruct::MetricProfile& a, const std::vector<SecondOrderSample>& b);

struct CrossValidation {
  double t0 = 0.0;
  double t_end = 0.0;
  Deviation deviation;
  double conservation_initial = 0.0;
  double conservation_drift = 0.0;  // max |Q(t) - Q(t0)|
};

/// Starts the oracle at the profile row nearest t0_factor times the first
/// reconstructed t and integrates over `decades` decades of t.
CrossValidation cross_validate(const reconstruct::MetricProfile& profile, const model::ProblemSpec& spec,
                               double t0_factor = 10.0, double decades = 1.0, const OracleControls& controls = {});

}  // namespace solitonforge::oracle
