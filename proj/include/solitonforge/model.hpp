#pragma once

#include <cstddef>
#include <vector>

namespace solitonforge {

/// State of the phase-space system: independent variable s and the
/// coordinates X, Y (one entry per Einstein factor).
struct PhasePoint {
  double s = 0.0;
  std::vector<double> X;
  std::vector<double> Y;
};

namespace model {

/// One Einstein factor (M_i, h_i): its dimension and Einstein constant.
struct FactorSpec {
  int dim = 0;
  double einstein_const = 0.0;
};

enum class Mode { Soliton, RicciFlat };

struct StepControls {
  double initial_step = 1e-2;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_steps = 200000;
};

/// Full problem description. The first factor is the collapsing sphere.
///
/// seed_coeffs[0] multiplies the 2*beta^2 eigendirection, seed_coeffs[k]
/// (k >= 1) the unit Y direction of factor k. The seed is placed on the
/// quadratic approximation of the unstable manifold when seed_order == 2.
struct ProblemSpec {
  std::vector<FactorSpec> factors;
  double gauge_C = -1.0;
  std::vector<double> seed_coeffs;
  int seed_order = 2;
  double s_start = 0.0;
  double s_max = 1e18;
  double origin_tol = 1e-8;
  StepControls step;
  Mode mode = Mode::Soliton;

  std::size_t rank() const noexcept { return factors.size(); }
};

struct Constants {
  double beta = 0.0;       // 1/sqrt(d_1)
  double beta_hat = 0.0;   // +sqrt(1 - beta^2)
  int total_dim_n = 0;     // sum of d_i
};

/// Returns `raw` unchanged when every standing hypothesis holds; throws
/// solitonforge::Error (module "model") otherwise.
ProblemSpec validate_spec(const ProblemSpec& raw);

Constants constants(const ProblemSpec& spec);

/// X_1 = beta, Y_1 = beta_hat, everything else zero, at s = spec.s_start.
PhasePoint critical_point(const ProblemSpec& spec);

/// Spec with the given dims, lambda_1 = d_1 - 1 and lambda_i = d_i - 1 for
/// the other factors (round spheres), default seeding and controls.
ProblemSpec make_spec(const std::vector<int>& dims);

/// Default seed: eps_0 = -1e-4, eps_k = 1e-4.
std::vector<double> default_seed_coeffs(std::size_t rank);

}  // namespace model
}  // namespace solitonforge
