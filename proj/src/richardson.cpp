#include "solitonforge/richardson.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "solitonforge/error.hpp"

namespace solitonforge::verify {
namespace {

double basis_power(Parity parity, int k) {
  if (k == 0) return 0.0;
  switch (parity) {
    case Parity::Even: return 2.0 * k;
    case Parity::Odd: return 2.0 * k - 1.0;
    case Parity::None: return k;
  }
  return k;
}

double fit_constant(const std::vector<std::pair<double, double>>& v, int terms, Parity parity) {
  // Abscissae are rescaled to [0, 1] to keep the Vandermonde system well conditioned.
  double scale = 0.0;
  for (int j = 0; j < terms; ++j) scale = std::max(scale, std::abs(v[j].first));
  if (scale == 0.0) scale = 1.0;
  Eigen::MatrixXd V(terms, terms);
  Eigen::VectorXd rhs(terms);
  for (int j = 0; j < terms; ++j) {
    const double x = v[j].first / scale;
    for (int k = 0; k < terms; ++k) V(j, k) = std::pow(x, basis_power(parity, k));
    rhs(j) = v[j].second;
  }
  return V.colPivHouseholderQr().solve(rhs)(0);
}

}  // namespace

Extrapolation richardson_extrapolate(std::vector<std::pair<double, double>> values, int order, Parity parity) {
  if (values.size() < 3)
    throw Error("verify", Errc::TooFewSamples,
                "extrapolation needs at least 3 samples, got " + std::to_string(values.size()));
  std::sort(values.begin(), values.end(),
            [](const auto& a, const auto& b) { return std::abs(a.first) < std::abs(b.first); });
  const int available = static_cast<int>(values.size()) - 1;
  if (order < 0 || order > available) order = available;
  order = std::max(order, 2);
  Extrapolation out;
  out.order = order;
  out.limit = fit_constant(values, order + 1, parity);
  out.error_estimate = std::abs(out.limit - fit_constant(values, order, parity));
  return out;
}

}  // namespace solitonforge::verify
