#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hypres/quad.hpp"

using namespace hypres;

TEST(GaussLegendre, ExactForPolynomials) {
  const auto& g = gauss_legendre(20);
  for (int p = 0; p <= 39; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
    const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
    EXPECT_NEAR(s, exact, 1e-14) << p;
  }
}

TEST(Adaptive, AlgebraicEndpointWeight) {
  // int_0^1 cos(x) / sqrt(x) dx, frozen from mpmath
  AdaptiveOptions o;
  o.rel_tol = 1e-13;
  o.singularity = Singularity{0.0, -0.5};
  const auto r = integrate_adaptive([](double x) -> cplx { return std::cos(x) / std::sqrt(x); }, 0.0, 1.0, o);
  EXPECT_NEAR(r.value.real(), 1.8090484758005441488, 1e-12);
}

TEST(Adaptive, OscillatoryWithSingularEndpoint) {
  // int_0^1 cos(50x) x^{1/2} (1-x)^{-1/2} e^{-x} dx, frozen from mpmath
  AdaptiveOptions o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-15;
  o.singularity = Singularity{1.0, -0.5};
  const auto r = integrate_adaptive(
      [](double x) -> cplx { return std::cos(50 * x) * std::sqrt(x) / std::sqrt(1 - x) * std::exp(-x); }, 0.0, 1.0, o);
  EXPECT_NEAR(r.value.real(), 0.043668783133294296716, 1e-11);
}

TEST(Adaptive, BudgetExhaustionReportsBestValue) {
  AdaptiveOptions o;
  o.rel_tol = 1e-15;
  o.max_evaluations = 200;
  try {
    integrate_adaptive([](double x) -> cplx { return std::sin(1.0 / (x + 1e-4)); }, 0.0, 1.0, o);
    FAIL();
  } catch (const QuadratureError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::convergence_failure);
    EXPECT_GT(e.best().evaluations, 0u);
  }
}

TEST(Periodic, SpectralConvergence) {
  // mean of e^{cos 2 pi t} over a period is I0(1)
  const auto r = integrate_periodic([](double t) -> cplx { return std::exp(std::cos(2 * std::numbers::pi * t)); });
  EXPECT_NEAR(r.value.real(), 1.2660658777520083356, 1e-14);
}

TEST(Phase, ClassifiesCriticalPoints) {
  auto one = [](double) { return 1.0; };
  const auto quad = analyze_phase([](double x) { return (x - 0.3) * (x - 0.3); }, one, {0.0, 1.0, false});
  ASSERT_EQ(quad.critical_points.size(), 1u);
  EXPECT_NEAR(quad.critical_points[0].location, 0.3, 1e-7);
  EXPECT_EQ(quad.regime, PhaseRegime::nondegenerate);

  const auto cubic = analyze_phase([](double x) { return std::pow(x - 0.6, 3); }, one, {0.0, 1.0, false});
  ASSERT_FALSE(cubic.critical_points.empty());
  EXPECT_EQ(cubic.regime, PhaseRegime::cubic_degenerate);

  const auto none = analyze_phase([](double x) { return 3.0 * x; }, one, {0.0, 1.0, false});
  EXPECT_EQ(none.regime, PhaseRegime::no_critical_point);
}
