#pragma once

#include <utility>
#include <vector>

#include "solitonforge/model.hpp"
#include "solitonforge/reconstruct.hpp"

namespace solitonforge::geometry {

/// Ricci tensor of dt^2 + sum g_i^2 h_i on unit vectors: the normal
/// direction and one direction tangent to each factor.
struct RicciSample {
  double t = 0.0;
  double ric_tt = 0.0;
  std::vector<double> ric_factor;
};

std::vector<RicciSample> ricci_components(const reconstruct::MetricProfile& profile);

/// Hess(u) on the same unit vectors: u_ddot normal, u_dot g_dot_i / g_i tangent.
struct HessianSample {
  double normal = 0.0;
  std::vector<double> factor;
};
HessianSample potential_hessian(const reconstruct::ProfileRow& row);

/// max over samples and components of |Ric + Hess u|.
double soliton_residual(const reconstruct::MetricProfile& profile);

struct CurvatureSample {
  double t = 0.0;
  double ric_tt = 0.0;
  std::vector<double> ric_factor;
  std::vector<double> sectional_mixed_t;                 // K(U ^ d/dt) = -g_ddot_i / g_i
  std::vector<std::vector<double>> sectional_cross;      // K(U ^ V) = -g_dot_i g_dot_j / (g_i g_j), i != j
  std::vector<double> sectional_within_min;              // (K_h - g_dot_i^2) / g_i^2 over the K_h interval;
  std::vector<double> sectional_within_max;              // NaN for one-dimensional factors
  double scalar_R = 0.0;                                  // trace of Ric
  double scalar_R_trace = 0.0;                            // -(u_ddot + trL u_dot)
  double soliton_residual = 0.0;
};

struct CurvatureReport {
  std::vector<CurvatureSample> samples;
  double soliton_residual_max = 0.0;
  double min_ricci = 0.0;
  double max_abs_ricci = 0.0;
  double max_scalar_mismatch = 0.0;  // relative, between the two routes to R
};

/// Sectional curvature bounds of each factor's own metric h_i. The default is
/// the round sphere with Ric = lambda h, K = lambda / (d - 1).
std::vector<std::pair<double, double>> default_sectional_bounds(const model::ProblemSpec& spec);

CurvatureReport sectional_curvatures(const reconstruct::MetricProfile& profile,
                                     const std::vector<std::pair<double, double>>& K_h_bounds);

struct AsymptoticsReport {
  std::vector<double> g_gdot_limit;       // per factor, extrapolated in 1/t
  std::vector<double> g_gdot_error;
  std::vector<double> g_gdot_target;      // lambda_i / sqrt(-C)
  std::vector<double> g_sq_over_t;        // at the last sample
  std::vector<double> g_sq_over_t_target; // 2 lambda_i / sqrt(-C)
  std::vector<double> g_sq_exponent;      // fitted slope of log g_i^2 against log t
  double K_slope = 0.0;                   // slope of log max|K| against log t
  double R_slope = 0.0;
  double R_t_limit = 0.0;
  std::vector<std::pair<double, double>> R_t2_ladder;  // (t, R t^2) on a geometric ladder
  bool R_t2_increasing = false;
  bool cross_negative_at_large_t = false;  // some K(U ^ V) < 0 on the last ladder rung (r >= 2)
  double t_first = 0.0;
  double t_last = 0.0;
};

/// Tail analysis over the final two decades of t. Throws InsufficientTail
/// when the trajectory stopped before reaching the asymptotic regime.
AsymptoticsReport asymptotics(const reconstruct::MetricProfile& profile, const model::ProblemSpec& spec);

}  // namespace solitonforge::geometry
