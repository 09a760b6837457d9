#include "solitonforge/model.hpp"

#include <cmath>
#include <string>

#include "solitonforge/error.hpp"

namespace solitonforge::model {
namespace {

[[noreturn]] void fail(Errc code, const std::string& detail) { throw Error("model", code, detail); }

}  // namespace

ProblemSpec validate_spec(const ProblemSpec& raw) {
  if (raw.factors.empty()) fail(Errc::DimensionTooSmall, "at least one factor is required");
  for (std::size_t i = 0; i < raw.factors.size(); ++i) {
    const auto& f = raw.factors[i];
    const std::string where = "factors[" + std::to_string(i) + "]";
    if (f.dim < 1) fail(Errc::DimensionTooSmall, where + ".dim must be >= 1");
    if (!(f.einstein_const > 0.0) || !std::isfinite(f.einstein_const))
      fail(Errc::BadNormalization, where + ".einstein_const must be positive");
  }
  const auto& first = raw.factors.front();
  if (first.dim < 2) fail(Errc::DimensionTooSmall, "factors[0].dim must be >= 2 (collapsing sphere)");
  const double expected = first.dim - 1.0;
  if (std::abs(first.einstein_const - expected) > 1e-12 * expected)
    fail(Errc::BadNormalization,
         "factors[0].einstein_const must equal dim - 1 = " + std::to_string(first.dim - 1));
  if (!(raw.gauge_C < 0.0) || !std::isfinite(raw.gauge_C)) fail(Errc::NonNegativeGauge, "gauge_C must be negative");

  if (raw.seed_coeffs.size() != raw.rank())
    fail(Errc::LengthMismatch, "seed_coeffs must have one entry per factor");
  for (double e : raw.seed_coeffs)
    if (!std::isfinite(e)) fail(Errc::BadSeedSign, "seed coefficients must be finite");
  // All-zero coefficients select the critical point itself (a stationary run).
  bool all_zero = true;
  for (double e : raw.seed_coeffs) all_zero = all_zero && e == 0.0;
  if (!all_zero) {
    if (raw.mode == Mode::Soliton && !(raw.seed_coeffs[0] < 0.0))
      fail(Errc::BadSeedSign, "eps0 must be negative in soliton mode");
    for (std::size_t k = 1; k < raw.seed_coeffs.size(); ++k)
      if (!(raw.seed_coeffs[k] > 0.0))
        fail(Errc::BadSeedSign, "eps" + std::to_string(k + 1) + " must be positive");
  }

  if (raw.seed_order != 1 && raw.seed_order != 2) fail(Errc::InvalidControls, "seed_order must be 1 or 2");
  const auto& st = raw.step;
  if (!(st.initial_step > 0.0) || !(st.abs_tol > 0.0) || !(st.rel_tol > 0.0) || st.max_steps == 0)
    fail(Errc::InvalidControls, "step controls must be positive");
  if (!(raw.s_max > raw.s_start) || !std::isfinite(raw.s_start))
    fail(Errc::InvalidControls, "s_max must exceed s_start");
  if (!(raw.origin_tol > 0.0)) fail(Errc::InvalidControls, "origin_tol must be positive");
  return raw;
}

Constants constants(const ProblemSpec& spec) {
  Constants c;
  const double d1 = spec.factors.front().dim;
  c.beta = 1.0 / std::sqrt(d1);
  c.beta_hat = std::sqrt(1.0 - 1.0 / d1);
  for (const auto& f : spec.factors) c.total_dim_n += f.dim;
  return c;
}

PhasePoint critical_point(const ProblemSpec& spec) {
  const auto c = constants(spec);
  PhasePoint p;
  p.s = spec.s_start;
  p.X.assign(spec.rank(), 0.0);
  p.Y.assign(spec.rank(), 0.0);
  p.X[0] = c.beta;
  p.Y[0] = c.beta_hat;
  return p;
}

std::vector<double> default_seed_coeffs(std::size_t rank) {
  std::vector<double> eps(rank, 1e-4);
  if (rank > 0) eps[0] = -1e-4;
  return eps;
}

ProblemSpec make_spec(const std::vector<int>& dims) {
  ProblemSpec spec;
  for (int d : dims) spec.factors.push_back({d, d > 1 ? d - 1.0 : 1.0});
  spec.seed_coeffs = default_seed_coeffs(dims.size());
  return spec;
}

}  // namespace solitonforge::model
