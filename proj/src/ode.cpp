#include "solitonforge/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace solitonforge::ode {
namespace {

bool all_finite(const Vec& v) { return v.allFinite(); }

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                 b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

struct RadauTableau {
  double c[3];
  double a[3][3];
};

const RadauTableau& radau_tableau() {
  static const RadauTableau t = [] {
    const double r6 = std::sqrt(6.0);
    RadauTableau out{};
    out.c[0] = (4.0 - r6) / 10.0;
    out.c[1] = (4.0 + r6) / 10.0;
    out.c[2] = 1.0;
    out.a[0][0] = (88.0 - 7.0 * r6) / 360.0;
    out.a[0][1] = (296.0 - 169.0 * r6) / 1800.0;
    out.a[0][2] = (-2.0 + 3.0 * r6) / 225.0;
    out.a[1][0] = (296.0 + 169.0 * r6) / 1800.0;
    out.a[1][1] = (88.0 + 7.0 * r6) / 360.0;
    out.a[1][2] = (-2.0 - 3.0 * r6) / 225.0;
    out.a[2][0] = (16.0 - r6) / 36.0;
    out.a[2][1] = (16.0 + r6) / 36.0;
    out.a[2][2] = 1.0 / 9.0;
    return out;
  }();
  return t;
}

struct NewtonResult {
  Vec y;
  bool converged = false;
};

NewtonResult radau_solve(const RhsFn& f, const JacFn& jac, const Vec& y, double h, const NormFn& norm) {
  const auto& tab = radau_tableau();
  const Eigen::Index n = y.size();
  Mat J(n, n);
  jac(y, J);
  Mat M = Mat::Identity(3 * n, 3 * n);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) M.block(i * n, k * n, n, n) -= h * tab.a[i][k] * J;
  Eigen::PartialPivLU<Mat> lu(M);

  Vec Z = Vec::Zero(3 * n);
  Vec F(3 * n), R(3 * n), fi(n);
  double prev = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 12; ++iter) {
    for (int i = 0; i < 3; ++i) {
      f(y + Z.segment(i * n, n), fi);
      F.segment(i * n, n) = fi;
    }
    if (!all_finite(F)) return {};
    for (int i = 0; i < 3; ++i) {
      Vec acc = -Z.segment(i * n, n);
      for (int k = 0; k < 3; ++k) acc += h * tab.a[i][k] * F.segment(k * n, n);
      R.segment(i * n, n) = acc;
    }
    const Vec dZ = lu.solve(R);
    Z += dZ;
    double size = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Vec yi = y + Z.segment(i * n, n);
      size = std::max(size, norm(dZ.segment(i * n, n), y, yi));
    }
    if (!std::isfinite(size)) return {};
    if (size < 1e-2) return {y + Z.segment(2 * n, n), true};
    if (iter >= 2 && size > 0.9 * prev) return {};
    prev = size;
  }
  return {};
}

}  // namespace

NormFn scalar_tolerance_norm(double abs_tol, double rel_tol) {
  return [abs_tol, rel_tol](const Vec& err, const Vec& y_old, const Vec& y_new) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < err.size(); ++k) {
      const double w = abs_tol + rel_tol * std::max(std::abs(y_old(k)), std::abs(y_new(k)));
      const double q = err(k) / w;
      acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(1, err.size())));
  };
}

ExplicitStep dormand_prince_step(const RhsFn& f, const Vec& y, const Vec& f0, double h, const NormFn& norm) {
  const Eigen::Index n = y.size();
  Vec k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  f(y + h * a21 * f0, k2);
  f(y + h * (a31 * f0 + a32 * k2), k3);
  f(y + h * (a41 * f0 + a42 * k2 + a43 * k3), k4);
  f(y + h * (a51 * f0 + a52 * k2 + a53 * k3 + a54 * k4), k5);
  const Vec y6 = y + h * (a61 * f0 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
  f(y6, k6);
  ExplicitStep out;
  out.y = y + h * (b1 * f0 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  f(out.y, k7);
  out.f = k7;
  if (!all_finite(out.y) || !all_finite(k7)) {
    out.error_norm = std::numeric_limits<double>::infinity();
    return out;
  }
  const Vec err = h * (e1 * f0 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  out.error_norm = norm(err, y, out.y);
  // Measured in the error norm so that components on very different scales
  // (a fast but tiny coordinate next to a slow large one) are seen.
  const double dy = norm(out.y - y6, y, out.y);
  out.stiffness_h_rho = dy > 0.0 ? std::abs(h) * norm(k7 - k6, y, out.y) / dy : 0.0;
  return out;
}

ImplicitStep radau_step(const RhsFn& f, const JacFn& jac, const Vec& y, double h, const NormFn& norm) {
  ImplicitStep out;
  const auto full = radau_solve(f, jac, y, h, norm);
  if (!full.converged) return out;
  const auto half1 = radau_solve(f, jac, y, 0.5 * h, norm);
  if (!half1.converged) return out;
  const auto half2 = radau_solve(f, jac, half1.y, 0.5 * h, norm);
  if (!half2.converged) return out;
  out.y = half2.y;
  out.f.resize(y.size());
  f(out.y, out.f);
  if (!all_finite(out.y) || !all_finite(out.f)) return out;
  // Local error of order h^6: the two-half-step result carries 1/31 of the difference.
  out.error_norm = norm((half2.y - full.y) / 31.0, y, out.y);
  out.converged = std::isfinite(out.error_norm);
  return out;
}

StepController::StepController(int error_order, double beta, double safety, double min_factor, double max_factor)
    : alpha_(1.0 / error_order - 0.75 * beta),
      beta_(beta),
      safety_(safety),
      min_factor_(min_factor),
      max_factor_(max_factor) {}

double StepController::propose(double h, double err, bool accepted) {
  double factor;
  if (!std::isfinite(err)) {
    factor = min_factor_;
  } else if (err == 0.0) {
    factor = max_factor_;
  } else {
    factor = safety_ * std::pow(err, -alpha_);
    if (accepted) factor *= std::pow(prev_err_, beta_);
  }
  factor = std::clamp(factor, min_factor_, max_factor_);
  if (accepted) {
    if (last_rejected_) factor = std::min(factor, 1.0);
    prev_err_ = std::max(err, 1e-4);
    last_rejected_ = false;
  } else {
    factor = std::min(factor, 1.0);
    last_rejected_ = true;
  }
  return h * factor;
}

namespace {

struct QuinticBasis {
  double h0, h1, h2, h3, h4, h5;
};

QuinticBasis quintic_basis(double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  QuinticBasis b{};
  b.h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  b.h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  b.h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
  b.h3 = 0.5 * (t3 - 2.0 * t4 + t5);
  b.h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  b.h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  return b;
}

}  // namespace

Vec hermite_quintic(const Vec& y0, const Vec& d0, const Vec& dd0, const Vec& y1, const Vec& d1, const Vec& dd1,
                    double h, double theta) {
  const auto b = quintic_basis(theta);
  return b.h0 * y0 + (h * b.h1) * d0 + (h * h * b.h2) * dd0 + b.h5 * y1 + (h * b.h4) * d1 + (h * h * b.h3) * dd1;
}

double hermite_quintic(double y0, double d0, double dd0, double y1, double d1, double dd1, double h, double theta) {
  const auto b = quintic_basis(theta);
  return b.h0 * y0 + h * b.h1 * d0 + h * h * b.h2 * dd0 + b.h5 * y1 + h * b.h4 * d1 + h * h * b.h3 * dd1;
}

double hermite_cubic(double y0, double d0, double y1, double d1, double h, double theta) {
  const double t = theta, t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

const std::array<double, 5> GaussLegendre5::nodes = [] {
  const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  return std::array<double, 5>{0.5 * (1 - b), 0.5 * (1 - a), 0.5, 0.5 * (1 + a), 0.5 * (1 + b)};
}();

const std::array<double, 5> GaussLegendre5::weights = [] {
  const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
  const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
  return std::array<double, 5>{0.5 * wb, 0.5 * wa, 0.5 * 128.0 / 225.0, 0.5 * wa, 0.5 * wb};
}();

}  // namespace solitonforge::ode
