#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "hypres/eigen.hpp"
#include "hypres/quad.hpp"

using namespace hypres;

namespace {

// Published values for the three lowest cusp forms on PSL(2,Z).
constexpr double kR1 = 9.53369526135355755;   // odd
constexpr double kR2 = 12.17300832467967;     // odd
constexpr double kR3 = 13.77975135189073;     // even

const MaassForm& first_form() {
  static const MaassForm f = hejhal_solve(9.0, 10.0, Parity::odd);
  return f;
}
const MaassForm& even_form() {
  static const MaassForm f = hejhal_solve(13.5, 14.0, Parity::even);
  return f;
}

// Legendre values frozen from mpmath (no Condon-Shortley sign, unit L^2 with e^{i m phi}).
struct LegendreCase {
  int n, m;
  double theta, v;
};

}  // namespace

TEST(Legendre, MatchesFrozenValues) {
  const LegendreCase cases[] = {{5, 2, 0.7, 0.40613161196398954052},
                                {30, 3, 0.4, 0.37586400909701835627},
                                {12, 12, 1.1, 0.1421563189285641962},
                                {60, 60, std::numbers::pi / 2, 0.83658502721812559633}};
  for (const auto& c : cases) EXPECT_NEAR(normalized_legendre(c.n, c.m, c.theta), c.v, 1e-13) << c.n << "," << c.m;
}

TEST(SphereHarmonic, UnitNormAndEigenEquation) {
  const auto Y = sphere_harmonic(7, 3);
  // int over the sphere of Y^2, 2D Gauss-Legendre in (cos theta, phi)
  const auto& g = gauss_legendre(40);
  double s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (int k = 0; k < 64; ++k) {
      const double v = Y({std::acos(g.nodes[i]), 2 * std::numbers::pi * k / 64});
      s += g.weights[i] * v * v * 2 * std::numbers::pi / 64;
    }
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_LT(laplace_residual(Y, {1.0, 0.4}, sup_estimate(Y)), 1e-5);
  EXPECT_THROW(sphere_harmonic(3, 4), Error);
}

TEST(TorusMode, EigenEquation) {
  const auto t = torus_mode(3, -2);
  EXPECT_NEAR(t.mu, 4 * std::numbers::pi * std::numbers::pi * 13, 1e-9);
  EXPECT_LT(laplace_residual(t, {0.31, 0.77}, std::numbers::sqrt2), 1e-6);
}

TEST(Modular, PullbackLandsInFundamentalDomain) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> X(-20, 20), Y(0.001, 3);
  for (int i = 0; i < 200; ++i) {
    const cplx z = pullback_modular(cplx(X(rng), Y(rng)));
    EXPECT_LE(std::abs(z.real()), 0.5 + 1e-12);
    EXPECT_GE(std::norm(z), 1.0 - 1e-12);
  }
}

TEST(Hejhal, FindsPublishedEigenvalues) {
  EXPECT_NEAR(first_form().R, kR1, 1e-8);
  EXPECT_NEAR(even_form().R, kR3, 1e-8);
  EXPECT_NEAR(hejhal_solve(12.0, 12.5, Parity::odd).R, kR2, 1e-8);
  EXPECT_DOUBLE_EQ(first_form().coefficients[0], 1.0);
  EXPECT_LT(first_form().truncation_shift, 1e-6);
}

TEST(Hejhal, StableUnderTruncationAndHeight) {
  const double base = first_form().R;
  const int M0 = first_form().M0;
  EXPECT_NEAR(hejhal_solve(9.0, 10.0, Parity::odd, M0 + 8).R, base, 1e-6);
  EXPECT_NEAR(hejhal_solve(9.0, 10.0, Parity::odd, 0, 0.4 * 0.95).R, base, 1e-6);
  // Hecke relation a_4 = a_2^2 - 1 for a normalized eigenform
  const auto& a = first_form().coefficients;
  EXPECT_NEAR(a[3], a[1] * a[1] - 1.0, 1e-8);
  EXPECT_NEAR(a[5], a[1] * a[2], 1e-8);
}

TEST(Hejhal, NoEvenFormBelowTen) {
  try {
    hejhal_solve(9.0, 10.0, Parity::even);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_eigenvalue);
  }
}

TEST(Hejhal, InputChecks) {
  EXPECT_THROW(hejhal_solve(9.0, 11.5, Parity::odd), Error);
  EXPECT_THROW(hejhal_solve(10.0, 9.0, Parity::odd), Error);
  try {
    hejhal_solve(30.0, 30.5, Parity::even);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported);
  }
}

TEST(Maass, UnitNormByIndependentQuadrature) {
  // Adaptive quadrature over {|x| <= 1/2, |z| >= 1, y <= 6} in dx dy / y^2.
  for (const MaassForm* f : {&first_form(), &even_form()}) {
    AdaptiveOptions inner;
    inner.rel_tol = 1e-10;
    inner.abs_tol = 1e-14;
    AdaptiveOptions outer = inner;
    auto column = [&](double x) -> cplx {
      const double y0 = std::sqrt(1.0 - x * x);
      auto g = [&](double y) -> cplx {
        const double v = maass_value(*f, cplx(x, y));
        return v * v / (y * y);
      };
      inner.breakpoints = {1.0, 1.5, 2.5};
      return integrate_adaptive(g, y0, 6.0, inner).value;
    };
    const double total = integrate_adaptive(column, -0.5, 0.5, outer).value.real();
    EXPECT_NEAR(total, 1.0, 1e-7) << f->R;
  }
}

TEST(Maass, AutomorphyAndParity) {
  const auto f = std::make_shared<const MaassForm>(first_form());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (int i = 0; i < 20; ++i) {
    const double x = U(rng);
    const cplx z(x, std::sqrt(1.0 - x * x) + 0.3 * (U(rng) + 0.5));
    const double v = maass_series_value(*f, z);
    EXPECT_NEAR(maass_series_value(*f, -1.0 / z), v, 1e-8);
    EXPECT_NEAR(maass_series_value(*f, z + 1.0), v, 1e-12);
    EXPECT_NEAR(maass_series_value(*f, cplx(-z.real(), z.imag())), -v, 1e-12);  // odd
  }
  const auto phi = modular_eigenfunction(f);
  EXPECT_LT(laplace_residual(phi, {0.1, 1.3}, sup_estimate(phi)), 1e-4);
}

TEST(Maass, BelowFloorIsAnAccuracyLoss) {
  try {
    maass_value(first_form(), cplx(0.2, 0.01));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::accuracy_loss);
  }
}

TEST(MaassCache, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "hypres_test_cache";
  std::filesystem::remove_all(dir);
  const auto file = dir / cache_file_name(9, 10, Parity::odd);
  EXPECT_EQ(file.filename().string(), "maass_odd_9.0000_10.0000.json");
  EXPECT_FALSE(load_maass(file).has_value());
  save_maass(first_form(), file);
  const auto back = load_maass(file);
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->R, first_form().R);
  EXPECT_EQ(back->coefficients, first_form().coefficients);
  EXPECT_EQ(back->parity, Parity::odd);
  std::ofstream(file) << "{\"format\": \"something-else\"}";
  EXPECT_THROW(load_maass(file), Error);
  std::filesystem::remove_all(dir);
}
