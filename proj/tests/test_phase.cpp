#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "solitonforge/error.hpp"
#include "solitonforge/phase.hpp"

using namespace solitonforge;

namespace {

PhasePoint point(std::vector<double> X, std::vector<double> Y) { return PhasePoint{0.0, std::move(X), std::move(Y)}; }

model::ProblemSpec spec23() {
  auto spec = model::make_spec({2, 3});
  spec.factors[1].einstein_const = 2.0;
  return spec;
}

// Central differences of the field, ordered (X_1..X_r, Y_1..Y_r).
Eigen::MatrixXd fd_jacobian(const PhasePoint& p, const model::ProblemSpec& spec, double h = 1e-6) {
  const std::size_t r = p.X.size();
  Eigen::MatrixXd J(2 * r, 2 * r);
  for (std::size_t c = 0; c < 2 * r; ++c) {
    PhasePoint a = p, b = p;
    double& xa = c < r ? a.X[c] : a.Y[c - r];
    double& xb = c < r ? b.X[c] : b.Y[c - r];
    xa += h;
    xb -= h;
    const auto fa = phase::vector_field(a, spec), fb = phase::vector_field(b, spec);
    for (std::size_t i = 0; i < r; ++i) {
      J(i, c) = (fa.dX[i] - fb.dX[i]) / (2 * h);
      J(r + i, c) = (fa.dY[i] - fb.dY[i]) / (2 * h);
    }
  }
  return J;
}

}  // namespace

TEST_CASE("vector field at hand-evaluated points") {
  const auto f1 = phase::vector_field(point({0.0}, {1.0}), model::make_spec({2}));
  CHECK(f1.dX[0] == doctest::Approx(0.7071068).epsilon(1e-7));
  CHECK(f1.dY[0] == 0.0);

  const auto f = phase::vector_field(point({0.2, 0.1}, {0.6, 0.3}), spec23());
  CHECK(f.dX[0] == doctest::Approx(0.0645584).epsilon(1e-6));
  CHECK(f.dX[1] == doctest::Approx(-0.0430385).epsilon(1e-6));
  CHECK(f.dY[0] == doctest::Approx(-0.0548528).epsilon(1e-6));
  CHECK(f.dY[1] == doctest::Approx(-0.0023205).epsilon(1e-5));
}

TEST_CASE("vector field rejects mismatched lengths") {
  try {
    phase::vector_field(point({0.2}, {0.6, 0.3}), spec23());
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::LengthMismatch);
  }
}

TEST_CASE("lyapunov and H") {
  const auto spec = spec23();
  CHECK(std::abs(phase::lyapunov(model::critical_point(spec))) < 1e-15);
  CHECK(phase::lyapunov(point({0.0, 0.0}, {0.0, 0.0})) == -1.0);
  CHECK(phase::lyapunov(point({0.2, 0.1}, {0.6, 0.3})) == doctest::Approx(-0.5));
  CHECK(phase::hamiltonian_H(model::critical_point(spec), spec) == doctest::Approx(1.0));
  CHECK(phase::hamiltonian_H(point({0.0, 0.0}, {0.0, 0.0}), spec) == 0.0);
  CHECK(phase::hamiltonian_H(point({0.2, 0.1}, {0.6, 0.3}), spec) == doctest::Approx(0.4560477).epsilon(1e-7));
  CHECK(phase::radius_squared(point({0.2, 0.1}, {0.6, 0.3})) == doctest::Approx(0.5));
}

TEST_CASE("derivative of L equals 2 L sum X^2") {
  const auto spec = spec23();
  CHECK(phase::lyapunov_derivative_identity(model::critical_point(spec), spec) < 1e-15);
  CHECK(phase::lyapunov_derivative_identity(point({0.2, 0.1}, {0.6, 0.3}), spec) <= 1e-12);

  // Brute-force expansion of both sides at random points in the unit ball.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  const auto spec3 = model::make_spec({3, 2, 5});
  for (int k = 0; k < 200; ++k) {
    auto p = point({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)});
    const double L = phase::lyapunov(p);
    const auto f = phase::vector_field(p, spec3);
    double lhs = 0.0, sx = 0.0;
    for (int i = 0; i < 3; ++i) {
      lhs += 2 * p.X[i] * f.dX[i] + 2 * p.Y[i] * f.dY[i];
      sx += p.X[i] * p.X[i];
    }
    CHECK(std::abs(lhs - 2 * L * sx) <= 1e-12 * (1 + std::abs(L)));
    CHECK(phase::lyapunov_derivative_identity(p, spec3) <= 1e-12 * (1 + std::abs(L)));
  }
}

TEST_CASE("analytic Jacobian matches central differences") {
  for (const auto& dims : std::vector<std::vector<int>>{{2}, {2, 3}, {4, 2, 7}}) {
    const auto spec = model::make_spec(dims);
    const auto lin = phase::linearization(spec);
    const auto fd = fd_jacobian(model::critical_point(spec), spec);
    CHECK((lin.matrix - fd).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, lin.matrix.cwiseAbs().maxCoeff()));
    auto p = model::critical_point(spec);
    for (std::size_t i = 0; i < p.X.size(); ++i) {
      p.X[i] += 0.05 * (i + 1);
      p.Y[i] += 0.03;
    }
    const auto J = phase::jacobian(p, spec);
    CHECK((J - fd_jacobian(p, spec)).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, J.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("linearization block and spectrum") {
  const auto spec = model::make_spec({2, 3});
  const auto lin = phase::linearization(spec);
  const std::vector<double> expected{-0.5, -0.5, 0.5, 1.0};
  REQUIRE(lin.eigenvalues.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(lin.eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    CHECK(std::abs(lin.numeric_eigenvalues[i] - expected[i]) < 1e-10);
  }
  const auto c = model::constants(spec);
  const double b = c.beta, bh = c.beta_hat;
  // (X_1, Y_1) block and the diagonal entries of the other factors; ordering (X_1, X_2, Y_1, Y_2).
  CHECK(lin.matrix(0, 0) == doctest::Approx(3 * b * b - 1));
  CHECK(lin.matrix(0, 2) == doctest::Approx(2 * b * bh));
  CHECK(lin.matrix(2, 0) == doctest::Approx(b * bh));
  CHECK(std::abs(lin.matrix(2, 2)) < 1e-15);
  CHECK(lin.matrix(1, 1) == doctest::Approx(b * b - 1));
  CHECK(lin.matrix(3, 3) == doctest::Approx(b * b));

  // Unstable eigenvector (2 beta, beta_hat) with eigenvalue 2 beta^2 = 1.
  const Eigen::VectorXd v0 = lin.unstable_basis.at(0);
  CHECK(v0(0) / v0(2) == doctest::Approx(1.4142136 / 0.7071068));
  CHECK((lin.matrix * v0 - 1.0 * v0).norm() < 1e-14);
  CHECK(lin.unstable_eigenvalues.at(0) == doctest::Approx(1.0));
  CHECK(lin.unstable_eigenvalues.at(1) == doctest::Approx(0.5));

  // Stable eigenvector of the block, proportional to (1, -1) when d_1 = 2.
  const Eigen::Vector2d sv = lin.block_stable_vector;
  CHECK(sv(0) / sv(1) == doctest::Approx(-1.0));
  Eigen::Matrix2d block;
  block << lin.matrix(0, 0), lin.matrix(0, 2), lin.matrix(2, 0), lin.matrix(2, 2);
  CHECK((block * sv + 0.5 * sv).norm() < 1e-14);
}

TEST_CASE("eigenvalue multiset over dims and ranks") {
  for (int d1 : {2, 3, 4, 9})
    for (int r = 1; r <= 3; ++r) {
      std::vector<int> dims{d1};
      for (int i = 1; i < r; ++i) dims.push_back(2 + i);
      const auto spec = model::make_spec(dims);
      const double b2 = 1.0 / d1;
      std::vector<double> expected;
      for (int i = 0; i < r - 1; ++i) expected.push_back(b2);
      for (int i = 0; i < r; ++i) expected.push_back(b2 - 1);
      expected.push_back(2 * b2);
      std::sort(expected.begin(), expected.end());
      const auto lin = phase::linearization(spec);
      REQUIRE(lin.eigenvalues.size() == expected.size());
      for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(std::abs(lin.eigenvalues[i] - expected[i]) < 1e-14);
        CHECK(std::abs(lin.numeric_eigenvalues[i] - expected[i]) < 1e-10);
      }
    }
}

TEST_CASE("negating Y_i maps the field equivariantly") {
  const auto spec = model::make_spec({3, 2, 4});
  const auto p = point({0.1, -0.2, 0.3}, {0.4, 0.25, -0.15});
  const auto f = phase::vector_field(p, spec);
  for (int i = 0; i < 3; ++i) {
    auto q = p;
    q.Y[i] = -q.Y[i];
    const auto g = phase::vector_field(q, spec);
    for (int j = 0; j < 3; ++j) {
      CHECK(g.dX[j] == f.dX[j]);
      CHECK(g.dY[j] == (j == i ? -f.dY[j] : f.dY[j]));
    }
  }
}

TEST_CASE("adapted coordinates") {
  const auto spec = model::make_spec({2, 3, 5});
  const auto sd = phase::sqrt_dims(spec);
  const auto p = point({0.2, 0.1, -0.05}, {0.6, 0.3, 0.2});
  const Eigen::VectorXd z = phase::to_adapted(p, sd);
  std::vector<double> X, Y;
  phase::from_adapted(z, sd, X, Y);
  for (int i = 0; i < 3; ++i) {
    CHECK(X[i] == doctest::Approx(p.X[i]).epsilon(1e-15));
    CHECK(Y[i] == p.Y[i]);
    CHECK(z(i) == doctest::Approx(p.X[i] - p.Y[i] * p.Y[i] / sd[i]));
  }

  // dG = dX - 2 Y dY / sqrt(d) by the chain rule.
  Eigen::VectorXd dz;
  phase::adapted_field(z, sd, dz);
  const auto f = phase::vector_field(p, spec);
  for (int i = 0; i < 3; ++i) {
    CHECK(dz(i) == doctest::Approx(f.dX[i] - 2 * p.Y[i] * f.dY[i] / sd[i]).epsilon(1e-13));
    CHECK(dz(3 + i) == doctest::Approx(f.dY[i]).epsilon(1e-13));
  }

  Eigen::MatrixXd J;
  phase::adapted_jacobian(z, sd, J);
  const double h = 1e-6;
  for (int c = 0; c < 6; ++c) {
    Eigen::VectorXd a = z, b = z, fa, fb;
    a(c) += h;
    b(c) -= h;
    phase::adapted_field(a, sd, fa);
    phase::adapted_field(b, sd, fb);
    const Eigen::VectorXd col = (fa - fb) / (2 * h);
    CHECK((J.col(c) - col).cwiseAbs().maxCoeff() < 1e-8);
  }
}
