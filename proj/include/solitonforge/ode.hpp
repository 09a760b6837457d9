#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>

namespace solitonforge::ode {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Right-hand side of an autonomous system y' = f(y).
using RhsFn = std::function<void(const Vec& y, Vec& dy)>;
using JacFn = std::function<void(const Vec& y, Mat& jac)>;
/// Scaled norm of a local error estimate; a value <= 1 means "within tolerance".
using NormFn = std::function<double(const Vec& err, const Vec& y_old, const Vec& y_new)>;

/// RMS norm with weights abs_tol + rel_tol * max(|y_old|, |y_new|).
NormFn scalar_tolerance_norm(double abs_tol, double rel_tol);

struct ExplicitStep {
  Vec y;
  Vec f;                       // f(y), reused as the first stage of the next step
  double error_norm = 0.0;
  double stiffness_h_rho = 0.0;  // h times a local estimate of the dominant eigenvalue modulus
};

/// One step of the Dormand-Prince 5(4) pair; f0 must equal f(y).
ExplicitStep dormand_prince_step(const RhsFn& f, const Vec& y, const Vec& f0, double h, const NormFn& norm);

struct ImplicitStep {
  Vec y;
  Vec f;
  double error_norm = 0.0;
  bool converged = false;
};

/// One step of the 3-stage Radau IIA method (order 5) with simplified Newton
/// iterations. The local error comes from step doubling, so a returned step
/// is the two-half-steps solution.
ImplicitStep radau_step(const RhsFn& f, const JacFn& jac, const Vec& y, double h, const NormFn& norm);

/// PI step-size controller (Gustafsson). error_order is the power of h in
/// the local error estimate.
class StepController {
 public:
  explicit StepController(int error_order, double beta = 0.04, double safety = 0.9, double min_factor = 0.2,
                          double max_factor = 5.0);

  /// Step size to try next. After a rejection the growth factor is capped at 1.
  double propose(double h, double err, bool accepted);

 private:
  double alpha_;
  double beta_;
  double safety_;
  double min_factor_;
  double max_factor_;
  double prev_err_ = 1e-4;
  bool last_rejected_ = false;
};

/// Quintic Hermite interpolant on [0, h] from value, first and second
/// derivative at both ends, evaluated at theta in [0, 1].
Vec hermite_quintic(const Vec& y0, const Vec& d0, const Vec& dd0, const Vec& y1, const Vec& d1, const Vec& dd1,
                    double h, double theta);
double hermite_quintic(double y0, double d0, double dd0, double y1, double d1, double dd1, double h, double theta);
double hermite_cubic(double y0, double d0, double y1, double d1, double h, double theta);

/// Five-point Gauss-Legendre rule on [0, 1].
struct GaussLegendre5 {
  static const std::array<double, 5> nodes;
  static const std::array<double, 5> weights;
};

}  // namespace solitonforge::ode
