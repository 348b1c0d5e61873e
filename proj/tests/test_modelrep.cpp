#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hypres/modelrep.hpp"

using namespace hypres;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST(KFixedVector, UnitNormAndRotationInvariant) {
  for (double tau : {4.0, 20.0, 80.0}) {
    const auto p = SpectralParam::from_lambda(cplx(0.0, tau));
    const auto e0 = k_fixed_vector(p);
    EXPECT_NEAR(representation_norm2(e0), 1.0, 1e-12) << tau;
    const auto k = pi_action(p, GroupElement::rotation(0.7), e0);
    for (double th : {0.0, 0.2, 0.55, 0.81}) EXPECT_LT(std::abs(k.circle(th) - e0.circle(th)), 1e-12) << th;
  }
}

TEST(ModelFunctional, EquivariantUnderDiagonal) {
  // d_s(pi(diag(a, 1/a)) v) = a^s d_s(v); trivial on the lattice s = 2 pi i n / ln a
  const auto p = SpectralParam::from_lambda(cplx(0.0, 10.0));
  const auto e0 = k_fixed_vector(p);
  const double a = 0.5 * (3.0 + std::sqrt(5.0));
  const auto moved = pi_action(p, GroupElement::diag(a, 1.0 / a), e0);
  for (cplx s : {cplx(0.0, 1.3), cplx(0.0, -4.0), cplx(0.0, 2.0 * std::numbers::pi / std::log(a))}) {
    const cplx lhs = model_functional(p, s, moved), rhs = std::exp(s * std::log(a)) * model_functional(p, s, e0);
    EXPECT_LT(rel(lhs, rhs), 1e-8) << s;
  }
}

TEST(DensityB, MatchesModelFunctionalOnE0) {
  const auto p = SpectralParam::from_lambda(cplx(0.0, 10.0));
  const double q = 1.0 / std::numbers::ln2;
  const auto d = density_b(p, q, -3, 12);
  const auto e0 = k_fixed_vector(p);
  for (long n : {-3L, 0L, 1L, 5L, 12L}) {
    const auto direct = model_functional_scaled(p, d.s(n), e0);
    EXPECT_LT(relative_difference(direct, d.find(n)->value), 1e-6) << n;
  }
}

TEST(DensityB, GammaQuotientFrozen) {
  // |Gamma((1-l+s)/4) Gamma((1-l-s)/4) / Gamma((1-l)/2)|^2 at l = 20i, s = 6i (mpmath)
  const auto p = SpectralParam::from_lambda(cplx(0.0, 20.0));
  const double v = density_b_entry(p, cplx(0.0, 6.0)).abs2();
  EXPECT_NEAR(v / 1.3195070580416963719, 1.0, 1e-13);
}

TEST(DensityB, RegimesFollowTheEdge) {
  const auto p = SpectralParam::from_lambda(cplx(0.0, 40.0));
  const double q = 1.0;
  const auto d = density_b(p, q, 0, 20);
  for (auto& [n, e] : d.entries) {
    const double w = 2.0 * std::numbers::pi * n * q;
    const Regime expect = w <= 0.9 * 40.0 ? Regime::bulk : (w < 1.1 * 40.0 ? Regime::edge : Regime::tail);
    EXPECT_EQ(e.regime, expect) << n;
  }
  EXPECT_THROW(density_b(p, 0.0, 0, 3), Error);
  EXPECT_THROW(density_b(SpectralParam::from_lambda(cplx(0.3, 4.0)), 1.0, 0, 3), Error);
}

TEST(DensityC, OddModesVanishAndSumIsUnitNorm) {
  const auto p = SpectralParam::from_lambda(cplx(0.0, 30.0));
  const auto g = GroupElement::diag(2.0, 0.5);
  const auto d = density_c(p, g, -160, 160);
  double total = 0.0;
  for (auto& [n, e] : d.entries) {
    if (n % 2) EXPECT_LT(std::abs(e.value.value()), 1e-13) << n;
    total += e.value.abs2();
  }
  // pi(g) e0 has unit norm; past |n| = 120 the modes carry nothing at this lambda
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_NEAR(d.edge_constant, circle_edge_constant(g), 0.0);
  EXPECT_THROW(density_c(p, GroupElement::rotation(0.4), 0, 4), Error);
}

TEST(TestVector, NormIsLinearInT) {
  const double c1 = test_vector_c1();
  for (double T : {1.0, 10.0, 73.0}) {
    const auto v = test_vector(SpectralParam::from_lambda(cplx(0.0, 5.0)), T);
    EXPECT_NEAR(representation_norm2(v) / (c1 * T), 1.0, 1e-10) << T;
  }
  EXPECT_THROW(test_vector(SpectralParam::from_lambda(cplx(0.0, 5.0)), 0.5), Error);
}

TEST(DensityTable, CsvColumns) {
  const auto d = density_b(SpectralParam::from_lambda(cplx(0.0, 10.0)), 1.0, 0, 2);
  std::ostringstream os;
  write_density_csv(d, os);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "n,re,im,abs2,log10_abs2,regime");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
}
