#pragma once

#include <utility>
#include <vector>

namespace solitonforge::verify {

/// Which powers of t the data is expanded in around t = 0.
/// Even: 1, t^2, t^4, ...; Odd: 1, t, t^3, t^5, ...; None: 1, t, t^2, ...
/// The constant term is always present so a vanishing limit is measured, not imposed.
enum class Parity { Even, Odd, None };

struct Extrapolation {
  double limit = 0.0;
  /// |limit at this order - limit at the previous order|
  double error_estimate = 0.0;
  int order = 0;
};

/// Polynomial extrapolation to t = 0 using the order + 1 samples closest to
/// zero (order < 0 means "use every sample"). Throws TooFewSamples for fewer
/// than three samples.
Extrapolation richardson_extrapolate(std::vector<std::pair<double, double>> values, int order = -1,
                                     Parity parity = Parity::None);

}  // namespace solitonforge::verify
