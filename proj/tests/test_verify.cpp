#include <doctest.h>

#include <cmath>

#include "solitonforge/error.hpp"
#include "solitonforge/verify.hpp"
#include "support.hpp"

using namespace solitonforge;
using verify::Parity;

TEST_CASE("Richardson extrapolation") {
  std::vector<std::pair<double, double>> v;
  for (double t : {0.1, 0.05, 0.025}) v.emplace_back(t, 3 + t * t);
  auto e = verify::richardson_extrapolate(v);
  CHECK(std::abs(e.limit - 3.0) <= 1e-10);
  e = verify::richardson_extrapolate(v, -1, Parity::Even);
  CHECK(std::abs(e.limit - 3.0) <= 1e-10);

  v.clear();
  for (double t : {0.4, 0.3, 0.2, 0.1, 0.05}) v.emplace_back(t, std::sin(t) / t);
  e = verify::richardson_extrapolate(v);
  CHECK(std::abs(e.limit - 1.0) <= 1e-6);
  e = verify::richardson_extrapolate(v, -1, Parity::Even);
  CHECK(std::abs(e.limit - 1.0) <= 1e-6);
  CHECK(e.error_estimate >= 0.0);

  // Odd data with a non-zero constant term keeps its constant.
  v.clear();
  for (double t : {0.2, 0.1, 0.05, 0.025}) v.emplace_back(t, 0.5 + 2 * t - t * t * t);
  e = verify::richardson_extrapolate(v, -1, Parity::Odd);
  CHECK(std::abs(e.limit - 0.5) <= 1e-12);

  try {
    verify::richardson_extrapolate({{0.1, 1.0}, {0.05, 1.0}});
    FAIL("expected TooFewSamples");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::TooFewSamples);
  }
}

TEST_CASE("Richardson error estimate is the change between the last two orders") {
  std::vector<std::pair<double, double>> v;
  for (double t : {0.4, 0.2, 0.1, 0.05}) v.emplace_back(t, std::exp(t));
  const auto full = verify::richardson_extrapolate(v, 3);
  const auto lower = verify::richardson_extrapolate(v, 2);
  CHECK(full.order == 3);
  CHECK(full.error_estimate == doctest::Approx(std::abs(full.limit - lower.limit)).epsilon(1e-12));
  CHECK(std::abs(full.limit - 1.0) <= full.error_estimate * 10 + 1e-12);
}

TEST_CASE("the suite passes for every tested dimension set") {
  for (const auto& dims : std::vector<std::vector<int>>{{2}, {3}, {4}, {9}, {2, 3}, {3, 5}, {2, 2, 3}}) {
    const auto& P = testsupport::soliton(dims);
    const auto rep = verify::run_suite(P.traj, P.profile, P.curv, P.spec);
    REQUIRE(rep.checks.size() == verify::check_ids().size());
    for (const auto& c : rep.checks) {
      INFO("dims[0] = ", dims[0], ", rank ", dims.size(), ", check ", c.id, " ", c.name, ": ", c.detail);
      CHECK(c.passed);
    }
    CHECK(rep.passed());
    CHECK(std::abs(rep.diagnostics.kappa + 1.0) < 1e-6);
  }
}

TEST_CASE("check ids are ordered and each check re-runs identically") {
  const std::vector<std::string> expected{"a", "b", "c", "d", "e", "f", "g", "decay", "h", "i", "j", "k",
                                          "conservation", "sectional", "decay_t", "paraboloid"};
  CHECK(verify::check_ids() == expected);
  const auto& P = testsupport::soliton({2, 3});
  const auto rep = verify::run_suite(P.traj, P.profile, P.curv, P.spec);
  const verify::Suite suite(P.traj, P.profile, P.curv, P.spec);
  for (std::size_t k = 0; k < expected.size(); ++k) {
    CHECK(rep.checks[k].id == expected[k]);
    const auto c = suite.run(expected[k]);
    CHECK(c.measured == rep.checks[k].measured);
    CHECK(c.passed == rep.checks[k].passed);
    CHECK(rep.find(expected[k]) == &rep.checks[k]);
  }
  CHECK(rep.find("nope") == nullptr);
  CHECK_THROWS_AS(suite.run("nope"), Error);
}

TEST_CASE("seed-end ratio target comes from the constants") {
  const auto& P = testsupport::soliton({2, 3});
  const auto rep = verify::run_suite(P.traj, P.profile, P.curv, P.spec);
  const double target = 1.0 / (std::sqrt(3.0) * 1.5);
  CHECK(target == doctest::Approx(0.3849002).epsilon(1e-7));
  CHECK(std::abs(rep.diagnostics.seed_ratio_limits.at(1) - target) <= 1e-3);
  // The check measures |limit - target| + error estimate.
  CHECK(rep.find("d")->measured <= 1e-3);
  CHECK(rep.find("d")->measured >= std::abs(rep.diagnostics.seed_ratio_limits.at(1) - target));
}

TEST_CASE("diagnostics") {
  const auto& P = testsupport::soliton({2, 3});
  const auto d = verify::run_suite(P.traj, P.profile, P.curv, P.spec).diagnostics;
  const double b2 = 0.5;
  CHECK(d.rho_estimate > 0.0);
  CHECK(std::abs(d.L_exponent / (2 * b2) - 1.0) < 0.05);
  CHECK(std::abs(d.Y_exponents.at(0) / b2 - 1.0) < 0.05);
  CHECK(d.L_scaled_limit < 0.0);
  CHECK(std::abs(d.boundary_g.at(0)) < 1e-3);
  CHECK(d.boundary_g.at(1) > 0.0);
  CHECK(std::abs(d.boundary_g_dot.at(0) - 1.0) < 1e-3);
  CHECK(std::isfinite(d.u0_product));
  CHECK(std::abs(d.u0_product - d.u0_extrapolated) <= 1e-3);
  CHECK(d.scale_limit > 0.0);
}

TEST_CASE("a flipped Y_2 sign is caught with a named diagnostic") {
  const auto& P = testsupport::soliton({2, 3});
  auto traj = P.traj;
  // The sample starting the step that holds one of the seed-end ladder rungs.
  const auto ladder = reconstruct::seed_end_ladder(P.traj, P.spec, P.profile);
  const std::size_t k = flow::locate_step(P.traj, ladder[3].s);
  traj.samples[k].Y[1] = -traj.samples[k].Y[1];
  traj.samples[k].z(3) = -traj.samples[k].z(3);
  const auto profile = reconstruct::reconstruct(traj, P.spec);
  const auto curv = geometry::sectional_curvatures(profile, geometry::default_sectional_bounds(P.spec));
  const auto rep = verify::run_suite(traj, profile, curv, P.spec);
  CHECK_FALSE(rep.passed());
  const auto* a = rep.find("a");
  CHECK_FALSE(a->passed);
  CHECK(a->detail.find("Y_2") != std::string::npos);
  const auto* d = rep.find("d");
  CHECK_FALSE(d->passed);
  CHECK_FALSE(d->detail.empty());
}

TEST_CASE("inputs the suite cannot use") {
  const auto& P = testsupport::soliton({2, 3});
  auto check_incomplete = [](const std::function<void()>& fn) {
    try {
      fn();
      FAIL("expected IncompleteInputs");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::IncompleteInputs);
      CHECK(e.module() == "verify");
    }
  };
  auto short_profile = P.profile;
  short_profile.rows.pop_back();
  check_incomplete([&] { verify::run_suite(P.traj, short_profile, P.curv, P.spec); });

  const auto spec = model::validate_spec(testsupport::ricci_flat_spec({2, 5}));
  const auto R = testsupport::run_pipeline(spec);
  check_incomplete([&] { verify::run_suite(R.traj, R.profile, R.curv, R.spec); });
}
