#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "solitonforge/model.hpp"

namespace solitonforge::phase {

struct PhaseDerivative {
  std::vector<double> dX;
  std::vector<double> dY;
};

/// X_i' = X_i (sum X_j^2 - 1) + Y_i^2 / sqrt(d_i)
/// Y_i' = Y_i (sum X_j^2 - X_i / sqrt(d_i))
PhaseDerivative vector_field(const PhasePoint& p, const model::ProblemSpec& spec);

/// sum X^2 + sum Y^2 - 1
double lyapunov(const PhasePoint& p);

/// sum X^2 + sum Y^2, i.e. lyapunov + 1 without the cancellation near the origin.
double radius_squared(const PhasePoint& p);

/// sum sqrt(d_i) X_i
double hamiltonian_H(const PhasePoint& p, const model::ProblemSpec& spec);

/// |dL(vector_field) - 2 L sum X^2|; zero up to rounding everywhere.
double lyapunov_derivative_identity(const PhasePoint& p, const model::ProblemSpec& spec);

/// Analytic Jacobian of vector_field, ordered (X_1..X_r, Y_1..Y_r).
Eigen::MatrixXd jacobian(const PhasePoint& p, const model::ProblemSpec& spec);

struct LinearizationReport {
  Eigen::MatrixXd matrix;
  /// Closed-form spectrum, sorted ascending.
  std::vector<double> eigenvalues;
  /// Real parts from a general eigensolver, sorted ascending.
  std::vector<double> numeric_eigenvalues;
  /// First the (2 beta, beta_hat) direction (eigenvalue 2 beta^2), then the
  /// unit Y_k directions for k = 2..r (eigenvalue beta^2).
  std::vector<Eigen::VectorXd> unstable_basis;
  std::vector<double> unstable_eigenvalues;
  /// Stable eigenvector (beta_hat, -beta) of the (X_1, Y_1) block.
  Eigen::Vector2d block_stable_vector;
};

LinearizationReport linearization(const model::ProblemSpec& spec);

// Slow-manifold adapted coordinates z = (G, Y) with G_i = X_i - Y_i^2/sqrt(d_i).
// Near the origin X_i tracks Y_i^2/sqrt(d_i) and the physically relevant
// quantity Y_i^2 - sqrt(d_i) X_i = -sqrt(d_i) G_i is orders of magnitude
// below X_i; carrying G directly keeps it at full relative precision.

Eigen::VectorXd to_adapted(const PhasePoint& p, std::span<const double> sqrt_d);
void from_adapted(const Eigen::VectorXd& z, std::span<const double> sqrt_d, std::vector<double>& X,
                  std::vector<double>& Y);
void adapted_field(const Eigen::VectorXd& z, std::span<const double> sqrt_d, Eigen::VectorXd& dz);
void adapted_jacobian(const Eigen::VectorXd& z, std::span<const double> sqrt_d, Eigen::MatrixXd& jac);

std::vector<double> sqrt_dims(const model::ProblemSpec& spec);

}  // namespace solitonforge::phase
