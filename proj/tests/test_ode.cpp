#include <doctest.h>

#include <cmath>

#include "solitonforge/ode.hpp"

using namespace solitonforge::ode;

namespace {

// Integrates y' = f(y) over [0, T] with fixed steps of DP5 and returns y(T).
Vec run_dp5(const RhsFn& f, Vec y, double T, int n) {
  const auto norm = scalar_tolerance_norm(1e-12, 1e-12);
  Vec f0;
  f(y, f0);
  const double h = T / n;
  for (int k = 0; k < n; ++k) {
    auto st = dormand_prince_step(f, y, f0, h, norm);
    y = st.y;
    f0 = st.f;
  }
  return y;
}

}  // namespace

TEST_CASE("Dormand-Prince is fifth order on a linear system") {
  const RhsFn f = [](const Vec& y, Vec& dy) {
    dy.resize(2);
    dy << y(1), -y(0);
  };
  Vec y0(2);
  y0 << 1.0, 0.0;
  const double T = 2.0;
  const double e1 = std::abs(run_dp5(f, y0, T, 40)(0) - std::cos(T));
  const double e2 = std::abs(run_dp5(f, y0, T, 80)(0) - std::cos(T));
  const double rate = std::log2(e1 / e2);
  CHECK(rate > 4.7);
  CHECK(rate < 5.6);
}

TEST_CASE("Dormand-Prince error estimate and stiffness measure") {
  const double lambda = -50.0;
  const RhsFn f = [lambda](const Vec& y, Vec& dy) { dy = lambda * y; };
  Vec y(1);
  y << 1.0;
  Vec f0;
  f(y, f0);
  const auto norm = scalar_tolerance_norm(1e-8, 1e-8);
  const auto st = dormand_prince_step(f, y, f0, 0.02, norm);
  CHECK(st.error_norm > 0.0);
  CHECK(st.stiffness_h_rho > 0.0);
  const auto small = dormand_prince_step(f, y, f0, 0.0005, norm);
  CHECK(small.error_norm < st.error_norm);
  CHECK(small.stiffness_h_rho < st.stiffness_h_rho);
}

TEST_CASE("Radau IIA is stable and accurate on a stiff linear problem") {
  const double lambda = -1e6;
  const RhsFn f = [lambda](const Vec& y, Vec& dy) {
    dy.resize(2);
    dy << lambda * (y(0) - std::cos(y(1))), 1.0;
  };
  const JacFn jac = [lambda](const Vec& y, Mat& J) {
    J.resize(2, 2);
    J << lambda, lambda * std::sin(y(1)), 0.0, 0.0;
  };
  // y(0) tracks cos(t) up to O(1/|lambda|).
  Vec y(2);
  y << 1.0, 0.0;
  const auto norm = scalar_tolerance_norm(1e-6, 1e-6);
  for (int k = 0; k < 10; ++k) {
    const auto st = radau_step(f, jac, y, 0.1, norm);
    REQUIRE(st.converged);
    y = st.y;
  }
  CHECK(y(1) == doctest::Approx(1.0));
  CHECK(std::abs(y(0) - std::cos(1.0)) < 1e-5);
}

TEST_CASE("Radau step matches the exact solution of y' = y") {
  const RhsFn f = [](const Vec& y, Vec& dy) { dy = y; };
  const JacFn jac = [](const Vec& y, Mat& J) { J = Mat::Identity(y.size(), y.size()); };
  Vec y(1);
  y << 1.0;
  const auto st = radau_step(f, jac, y, 0.1, scalar_tolerance_norm(1e-10, 1e-10));
  REQUIRE(st.converged);
  CHECK(std::abs(st.y(0) - std::exp(0.1)) < 1e-11);
  CHECK(st.error_norm < 1.0);
}

TEST_CASE("step controller") {
  StepController c(5);
  CHECK(c.propose(1.0, 1e-3, true) > 1.0);
  const double shrunk = c.propose(1.0, 10.0, false);
  CHECK(shrunk < 1.0);
  CHECK(shrunk >= 0.2);
  // Directly after a rejection the step may not grow.
  CHECK(c.propose(1.0, 1e-6, true) <= 1.0);
  CHECK(c.propose(1.0, 1e-12, true) <= 5.0);
}

TEST_CASE("Hermite interpolants reproduce polynomials") {
  // Quintic reproduces p(x) = 1 + x - 2x^3 + x^5 on [0, h].
  const double h = 0.7;
  auto p = [](double x) { return 1 + x - 2 * x * x * x + std::pow(x, 5); };
  auto dp = [](double x) { return 1 - 6 * x * x + 5 * std::pow(x, 4); };
  auto ddp = [](double x) { return -12 * x + 20 * x * x * x; };
  for (double th : {0.0, 0.13, 0.5, 0.91, 1.0}) {
    const double v = hermite_quintic(p(0), dp(0), ddp(0), p(h), dp(h), ddp(h), h, th);
    CHECK(v == doctest::Approx(p(th * h)).epsilon(1e-13));
  }
  auto q = [](double x) { return 2 - x + 3 * x * x * x; };
  auto dq = [](double x) { return -1 + 9 * x * x; };
  for (double th : {0.0, 0.3, 1.0})
    CHECK(hermite_cubic(q(0), dq(0), q(h), dq(h), h, th) == doctest::Approx(q(th * h)).epsilon(1e-13));

  Vec a(2), da(2), dda(2), b(2), db(2), ddb(2);
  a << p(0), q(0);
  da << dp(0), dq(0);
  dda << ddp(0), 0.0;
  b << p(h), q(h);
  db << dp(h), dq(h);
  ddb << ddp(h), 18 * h;
  dda(1) = 0.0;
  const Vec v = hermite_quintic(a, da, dda, b, db, ddb, h, 0.4);
  CHECK(v(0) == doctest::Approx(p(0.4 * h)).epsilon(1e-13));
  CHECK(v(1) == doctest::Approx(q(0.4 * h)).epsilon(1e-13));
}

TEST_CASE("five-point Gauss-Legendre is exact to degree nine") {
  double s = 0.0, w = 0.0;
  for (int i = 0; i < 5; ++i) {
    s += GaussLegendre5::weights[i] * std::pow(GaussLegendre5::nodes[i], 9);
    w += GaussLegendre5::weights[i];
  }
  CHECK(w == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s == doctest::Approx(0.1).epsilon(1e-14));
}
