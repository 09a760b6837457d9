#include "solitonforge/phase.hpp"

#include <algorithm>
#include <cmath>

#include "solitonforge/error.hpp"

namespace solitonforge::phase {
namespace {

void check_lengths(const PhasePoint& p, const model::ProblemSpec& spec) {
  if (p.X.size() != spec.rank() || p.Y.size() != spec.rank())
    throw Error("phase", Errc::LengthMismatch, "phase point does not match the number of factors");
}

double sum_sq(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

}  // namespace

std::vector<double> sqrt_dims(const model::ProblemSpec& spec) {
  std::vector<double> out;
  out.reserve(spec.rank());
  for (const auto& f : spec.factors) out.push_back(std::sqrt(static_cast<double>(f.dim)));
  return out;
}

PhaseDerivative vector_field(const PhasePoint& p, const model::ProblemSpec& spec) {
  check_lengths(p, spec);
  const std::size_t r = spec.rank();
  const double S = sum_sq(p.X);
  PhaseDerivative out{std::vector<double>(r), std::vector<double>(r)};
  for (std::size_t i = 0; i < r; ++i) {
    const double sd = std::sqrt(static_cast<double>(spec.factors[i].dim));
    out.dX[i] = p.X[i] * (S - 1.0) + p.Y[i] * p.Y[i] / sd;
    out.dY[i] = p.Y[i] * (S - p.X[i] / sd);
  }
  return out;
}

double lyapunov(const PhasePoint& p) { return radius_squared(p) - 1.0; }

double radius_squared(const PhasePoint& p) { return sum_sq(p.X) + sum_sq(p.Y); }

double hamiltonian_H(const PhasePoint& p, const model::ProblemSpec& spec) {
  check_lengths(p, spec);
  double h = 0.0;
  for (std::size_t i = 0; i < spec.rank(); ++i) h += std::sqrt(static_cast<double>(spec.factors[i].dim)) * p.X[i];
  return h;
}

double lyapunov_derivative_identity(const PhasePoint& p, const model::ProblemSpec& spec) {
  const auto f = vector_field(p, spec);
  double lhs = 0.0;
  for (std::size_t i = 0; i < spec.rank(); ++i) lhs += 2.0 * p.X[i] * f.dX[i] + 2.0 * p.Y[i] * f.dY[i];
  const double rhs = 2.0 * lyapunov(p) * sum_sq(p.X);
  return std::abs(lhs - rhs);
}

Eigen::MatrixXd jacobian(const PhasePoint& p, const model::ProblemSpec& spec) {
  check_lengths(p, spec);
  const auto r = static_cast<Eigen::Index>(spec.rank());
  const double S = sum_sq(p.X);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * r, 2 * r);
  for (Eigen::Index i = 0; i < r; ++i) {
    const double sd = std::sqrt(static_cast<double>(spec.factors[i].dim));
    const double Xi = p.X[i], Yi = p.Y[i];
    for (Eigen::Index k = 0; k < r; ++k) {
      J(i, k) = 2.0 * Xi * p.X[k];
      J(r + i, k) = 2.0 * Yi * p.X[k];
    }
    J(i, i) += S - 1.0;
    J(i, r + i) = 2.0 * Yi / sd;
    J(r + i, i) -= Yi / sd;
    J(r + i, r + i) = S - Xi / sd;
  }
  return J;
}

LinearizationReport linearization(const model::ProblemSpec& spec) {
  const auto c = model::constants(spec);
  const auto r = spec.rank();
  const double b2 = c.beta * c.beta;
  LinearizationReport rep;
  rep.matrix = jacobian(model::critical_point(spec), spec);

  rep.eigenvalues.push_back(2.0 * b2);
  for (std::size_t k = 0; k + 1 < r; ++k) rep.eigenvalues.push_back(b2);
  for (std::size_t k = 0; k < r; ++k) rep.eigenvalues.push_back(b2 - 1.0);
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());

  Eigen::EigenSolver<Eigen::MatrixXd> solver(rep.matrix, false);
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k)
    rep.numeric_eigenvalues.push_back(solver.eigenvalues()[k].real());
  std::sort(rep.numeric_eigenvalues.begin(), rep.numeric_eigenvalues.end());

  const auto n = static_cast<Eigen::Index>(2 * r);
  Eigen::VectorXd v0 = Eigen::VectorXd::Zero(n);
  v0(0) = 2.0 * c.beta;
  v0(static_cast<Eigen::Index>(r)) = c.beta_hat;
  rep.unstable_basis.push_back(v0);
  rep.unstable_eigenvalues.push_back(2.0 * b2);
  for (std::size_t k = 1; k < r; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(static_cast<Eigen::Index>(r + k)) = 1.0;
    rep.unstable_basis.push_back(v);
    rep.unstable_eigenvalues.push_back(b2);
  }
  rep.block_stable_vector = Eigen::Vector2d(c.beta_hat, -c.beta);
  return rep;
}

Eigen::VectorXd to_adapted(const PhasePoint& p, std::span<const double> sqrt_d) {
  const auto r = static_cast<Eigen::Index>(sqrt_d.size());
  Eigen::VectorXd z(2 * r);
  for (Eigen::Index i = 0; i < r; ++i) {
    z(i) = p.X[i] - p.Y[i] * p.Y[i] / sqrt_d[i];
    z(r + i) = p.Y[i];
  }
  return z;
}

void from_adapted(const Eigen::VectorXd& z, std::span<const double> sqrt_d, std::vector<double>& X,
                  std::vector<double>& Y) {
  const auto r = sqrt_d.size();
  X.resize(r);
  Y.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double y = z(static_cast<Eigen::Index>(r + i));
    Y[i] = y;
    X[i] = z(static_cast<Eigen::Index>(i)) + y * y / sqrt_d[i];
  }
}

void adapted_field(const Eigen::VectorXd& z, std::span<const double> sqrt_d, Eigen::VectorXd& dz) {
  const auto r = static_cast<Eigen::Index>(sqrt_d.size());
  dz.resize(2 * r);
  double S = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    const double x = z(i) + z(r + i) * z(r + i) / sqrt_d[i];
    S += x * x;
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    const double G = z(i), Y = z(r + i), sd = sqrt_d[i];
    const double Y2 = Y * Y;
    const double X = G + Y2 / sd;
    // G' = X' - 2 Y Y'/sqrt(d), expanded so that no two large terms cancel.
    dz(i) = G * (S - 1.0) - Y2 * S / sd + 2.0 * X * Y2 / (sd * sd);
    dz(r + i) = Y * (S - X / sd);
  }
}

void adapted_jacobian(const Eigen::VectorXd& z, std::span<const double> sqrt_d, Eigen::MatrixXd& jac) {
  const auto r = static_cast<Eigen::Index>(sqrt_d.size());
  jac.setZero(2 * r, 2 * r);
  Eigen::VectorXd X(r);
  double S = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    X(i) = z(i) + z(r + i) * z(r + i) / sqrt_d[i];
    S += X(i) * X(i);
  }
  for (Eigen::Index i = 0; i < r; ++i) {
    const double G = z(i), Y = z(r + i), sd = sqrt_d[i], d = sd * sd;
    const double Y2 = Y * Y;
    const double coupling = G - Y2 / sd;
    for (Eigen::Index k = 0; k < r; ++k) {
      const double dS_dG = 2.0 * X(k);
      const double dS_dY = 4.0 * X(k) * z(r + k) / sqrt_d[k];
      jac(i, k) = coupling * dS_dG;
      jac(i, r + k) = coupling * dS_dY;
      jac(r + i, k) = Y * dS_dG;
      jac(r + i, r + k) = Y * dS_dY;
    }
    jac(i, i) += S - 1.0 + 2.0 * Y2 / d;
    jac(i, r + i) += -2.0 * Y * S / sd + 4.0 * Y2 * Y / (d * sd) + 4.0 * X(i) * Y / d;
    jac(r + i, i) -= Y / sd;
    jac(r + i, r + i) += S - X(i) / sd - 2.0 * Y2 / d;
  }
}

}  // namespace solitonforge::phase
