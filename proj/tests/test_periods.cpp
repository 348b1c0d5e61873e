#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hypres/periods.hpp"

using namespace hypres;

namespace {

const std::shared_ptr<const MaassForm>& form() {
  static const auto f = std::make_shared<const MaassForm>(hejhal_solve(9.0, 10.0, Parity::odd));
  return f;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::input;
}

}  // namespace

TEST(Periods, SphereEquatorPlancherelAndNorm) {
  // int over the equator of (real Y_n^n)^2, frozen from mpmath
  const std::pair<int, double> cases[] = {{10, 1.8500690460205078125}, {100, 5.6630221404302704358}};
  for (auto [n, expected] : cases) {
    const auto t = periods(restrict(sphere_harmonic(n, n), sphere_equator()), -2 * n, 2 * n);
    EXPECT_LT(t.plancherel_error(), 1e-10) << n;
    EXPECT_NEAR(t.restriction_norm2(), expected, 1e-10 * expected) << n;
    // only the modes +-n are present
    EXPECT_NEAR(std::abs(t.find(n)->p_hat), std::sqrt(t.mass / 2.0), 1e-12);
    EXPECT_LT(std::abs(t.find(n - 1)->p_hat), 1e-13);
  }
}

TEST(Periods, TorusHorizontalExactCoefficients) {
  const double h = 0.13;
  const auto t = periods(restrict(torus_mode(3, 2), torus_horizontal(h)), -8, 8);
  const cplx expected = std::numbers::sqrt2 / 2.0 * std::exp(cplx(0.0, 4.0 * std::numbers::pi * h));
  EXPECT_LT(std::abs(t.find(3)->p_hat - expected), 1e-14);
  EXPECT_LT(std::abs(t.find(-3)->p_hat - std::conj(expected)), 1e-14);
  for (long n : {0L, 1L, 2L, 4L, -7L}) EXPECT_LT(std::abs(t.find(n)->p_hat), 1e-14) << n;
  EXPECT_NEAR(t.mass, 1.0, 1e-12);
  EXPECT_LT(t.plancherel_error(), 1e-12);
}

TEST(Periods, BasepointShiftRotatesPhases) {
  const GroupElement gamma(2.0, 1.0, 1.0, 1.0);
  const auto phi = modular_eigenfunction(form());
  const double th0 = 0.3;
  const auto a = periods(restrict(phi, geodesic_curve(gamma)), -20, 20);
  const auto b = periods(restrict(phi, geodesic_curve(gamma, th0)), -20, 20);
  const double scale = std::sqrt(a.mass);
  for (long n = -20; n <= 20; ++n) {
    const cplx pa = a.find(n)->p_hat, pb = b.find(n)->p_hat;
    EXPECT_NEAR(std::abs(pb), std::abs(pa), 1e-10 * scale) << n;
    const cplx rotated = pa * std::exp(cplx(0.0, 2.0 * std::numbers::pi * n * th0));
    EXPECT_LT(std::abs(pb - rotated), 1e-9 * scale) << n;
  }
  EXPECT_LT(a.plancherel_error(), 1e-9);
}

TEST(Periods, DegenerateAndMismatchedCurves) {
  EXPECT_EQ(kind_of([] { circle_curve(cplx(0.0, 1.2), 5e-4); }), ErrorKind::degenerate);
  EXPECT_EQ(kind_of([] { restrict(torus_mode(1, 0), sphere_equator()); }), ErrorKind::input);
  const auto prof = restrict(sphere_harmonic(3, 1), sphere_equator());
  EXPECT_EQ(kind_of([&] { periods(prof, -100000, 100000); }), ErrorKind::resolution);
  EXPECT_EQ(kind_of([&] { periods(prof, 3, 2); }), ErrorKind::input);
}

TEST(Extract, PlantedCoefficientsRoundTrip) {
  // profile with known a_n on a geodesic density: f = sum a_n b_n e(n theta), real
  const auto p = SpectralParam::from_lambda(cplx(0.0, 20.0));
  const auto d = density_b(p, 1.0, -6, 6);
  std::map<long, cplx> c;
  for (long n = 0; n <= 6; ++n) c[n] = n == 0 ? cplx(0.7, 0.0) : cplx(std::cos(1.0 + n), 0.5 * std::sin(2.0 * n));
  for (long n = 1; n <= 6; ++n) c[-n] = std::conj(c[n]);
  auto f = [&](double th) {
    double s = 0.0;
    for (auto& [n, v] : c) s += (v * std::exp(cplx(0.0, 2.0 * std::numbers::pi * n * th))).real();
    return s;
  };
  const auto t = extract_coefficients(periods(profile_from_function(f, 256), -6, 6), d);
  for (long n = -6; n <= 6; ++n) {
    const auto* e = t.find(n);
    ASSERT_TRUE(e->a.has_value()) << n;
    const cplx expected = c[n] / d.find(n)->value.value();
    EXPECT_LT(std::abs(e->a->value() - expected), 1e-12 * std::abs(expected)) << n;
  }
}

TEST(Extract, OddCircleModeIsInconsistent) {
  const auto p = SpectralParam::from_lambda(cplx(0.0, 20.0));
  const auto d = density_c(p, GroupElement::diag(2.0, 0.5), -4, 4);
  auto f = [](double th) { return 1.0 + 0.2 * std::cos(2.0 * std::numbers::pi * th); };
  const auto t = periods(profile_from_function(f, 256), -4, 4);
  EXPECT_EQ(kind_of([&] { extract_coefficients(t, d); }), ErrorKind::structural_inconsistency);
}

TEST(Extract, PartialSumsAreMonotone) {
  const GroupElement gamma(2.0, 1.0, 1.0, 1.0);
  const auto orbit = geodesic_orbit_from_matrix(gamma);
  const auto t = extract_coefficients(periods(restrict(modular_eigenfunction(form()), geodesic_curve(gamma)), -64, 64),
                                      density_b(SpectralParam::from_R(form()->R), orbit.q, -64, 64));
  double prev = 0.0;
  for (double T = 0; T <= 64; T += 1) {
    const double s = t.partial_sum(T);
    EXPECT_GE(s, prev) << T;
    prev = s;
  }
  EXPECT_GT(prev, 0.0);
  EXPECT_EQ(kind_of([&] { extract_coefficients(t, density_b(SpectralParam::from_R(5.0), orbit.q, 0, 2)); }),
            ErrorKind::consistency);
}

TEST(AverageBound, Preconditions) {
  PeriodTable t;
  t.entries[0] = PeriodEntry{};
  EXPECT_EQ(kind_of([&] { check_average_bound({t}, {1, 2, 3}); }), ErrorKind::input);
  EXPECT_EQ(kind_of([&] { check_average_bound({t, t}, {1, 2}); }), ErrorKind::input);
}

TEST(ExponentFit, RecoversPowerLaw) {
  std::vector<std::pair<double, double>> pairs;
  for (double mu : {10.0, 40.0, 160.0, 640.0, 2560.0}) pairs.push_back({mu, 2.0 * std::pow(mu, 0.25)});
  const auto fit = fit_restriction_exponent(pairs);
  EXPECT_NEAR(fit.exponent, 0.25, 1e-12);
  EXPECT_NEAR(fit.constant, 2.0, 1e-11);
  EXPECT_LT(fit.residual, 1e-12);
  pairs.pop_back();
  EXPECT_EQ(kind_of([&] { fit_restriction_exponent(pairs); }), ErrorKind::fit);
  std::vector<std::pair<double, double>> narrow;
  for (double mu : {10.0, 11.0, 12.0, 13.0, 14.0}) narrow.push_back({mu, 1.0});
  EXPECT_EQ(kind_of([&] { fit_restriction_exponent(narrow); }), ErrorKind::fit);
}
