#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "solitonforge/flow.hpp"
#include "solitonforge/geometry.hpp"
#include "solitonforge/model.hpp"
#include "solitonforge/reconstruct.hpp"
#include "solitonforge/richardson.hpp"

namespace solitonforge::verify {

struct Check {
  std::string id;     // short label, "a" .. "k" or a word for the extra checks
  std::string name;
  std::string claim;  // the statement being tested, in words
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;  // what failed, where
};

struct Diagnostics {
  double kappa = 0.0;                       // terminal L
  double rho_estimate = 0.0;                // lim (sum X^2 + Y_1^2 - 1) / L at the seed end
  double x1_ratio_limit = 0.0;              // lim (X_1 - beta) / L
  double L_exponent = 0.0;                  // fitted d log|L| / ds near the seed
  std::vector<double> Y_exponents;          // fitted d log Y_i / ds near the seed, i > 1
  double L_scaled_limit = 0.0;              // lim exp(-2 beta^2 s) L
  std::vector<double> seed_ratio_limits;    // lim X_i / Y_i^2 at the seed end
  std::vector<double> Q_limits;             // slope of X_i / Y_i^2 against L at the seed end
  std::vector<double> boundary_g;           // g_i(0)
  std::vector<double> boundary_g_dot;
  std::vector<double> boundary_g_ddot;
  double boundary_u_dot = 0.0;
  double boundary_u_ddot = 0.0;
  double u0_product = 0.0;                  // from the product formula
  double u0_extrapolated = 0.0;             // from extrapolating u(t)
  double scale_limit = 0.0;                 // lim exp(-beta^2 s) dt/ds
};

struct VerifyReport {
  std::vector<Check> checks;
  Diagnostics diagnostics;
  bool passed() const;
  const Check* find(std::string_view id) const;
};

/// Identifiers of every check, in report order.
const std::vector<std::string>& check_ids();

/// Shared state for the checks; builds the seed-end ladder, boundary
/// extrapolations and tail analysis once.
class Suite {
 public:
  Suite(const flow::Trajectory& traj, const reconstruct::MetricProfile& profile,
        const geometry::CurvatureReport& curv, const model::ProblemSpec& spec);

  /// Runs one check by id; throws IncompleteInputs for an unknown id.
  Check run(std::string_view id) const;
  const Diagnostics& diagnostics() const { return diag_; }

 private:
  const flow::Trajectory& traj_;
  const reconstruct::MetricProfile& profile_;
  const geometry::CurvatureReport& curv_;
  const model::ProblemSpec& spec_;
  model::Constants c_;
  std::vector<reconstruct::ProfileRow> ladder_;
  reconstruct::BoundaryValues bv_;
  geometry::AsymptoticsReport asym_;
  std::string asym_error_;
  Diagnostics diag_;
  std::vector<Extrapolation> seed_ratio_;
  Extrapolation rho_, x1_ratio_, L_scaled_;

  Check lyapunov_monotone() const;
  Check origin_convergence() const;
  Check origin_ratio() const;
  Check seed_ratio() const;
  Check x1_below_beta() const;
  Check x1_lyapunov_ratio() const;
  Check lyapunov_growth() const;
  Check decay_exponents() const;
  Check collapse_boundary() const;
  Check h_inequalities() const;
  Check ricci_and_residual() const;
  Check potential_product() const;
  Check conservation_identity() const;
  Check sectional_signs() const;
  Check curvature_decay() const;
  Check paraboloid() const;
};

/// Evaluates every check. Throws IncompleteInputs when the inputs are empty,
/// inconsistent, or not from a soliton run.
VerifyReport run_suite(const flow::Trajectory& traj, const reconstruct::MetricProfile& profile,
                       const geometry::CurvatureReport& curv, const model::ProblemSpec& spec);

}  // namespace solitonforge::verify
