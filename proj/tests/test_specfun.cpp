// Special functions against values frozen from mpmath (30 digits).

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "hypres/specfun.hpp"

using namespace hypres;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Imaginary parts of log-gamma agree only modulo 2 pi i across branches; the
// principal continuation used here matches mpmath's loggamma.
struct LogGammaCase {
  cplx z, expected;
};

}  // namespace

TEST(LogGamma, MatchesFrozenValues) {
  const LogGammaCase cases[] = {
      {{0.5, 0.0}, {0.57236494292470008707, 0.0}},
      {{3.7, 0.0}, {1.4280723266653881292, 0.0}},
      {{0.25, 5.0}, {-7.3370880842091811277, 2.656575032957105579}},
      {{-2.5, 0.5}, {-0.93508562129827747868, -8.8709628852474591986}},
      {{0.1, -40.0}, {-63.388462569939019935, -106.9259012676440596}},
      {{12.0, 120.0}, {-132.50294418150202057, 472.01330966925822243}},
  };
  for (const auto& c : cases) {
    const cplx v = log_gamma(c.z);
    EXPECT_NEAR(v.real(), c.expected.real(), 1e-13 * std::max(1.0, std::abs(c.expected.real()))) << c.z;
    EXPECT_NEAR(v.imag(), c.expected.imag(), 1e-13 * std::max(1.0, std::abs(c.expected.imag()))) << c.z;
  }
}

TEST(LogGamma, RecurrenceAndConjugation) {
  for (cplx z : {cplx(0.3, 0.7), cplx(2.5, -11.0), cplx(-3.4, 2.0), cplx(7.0, 60.0)}) {
    const cplx lhs = std::exp(log_gamma(z + 1.0) - log_gamma(z));
    EXPECT_LT(rel(lhs, z), 1e-12) << z;
    EXPECT_LT(std::abs(log_gamma(std::conj(z)) - std::conj(log_gamma(z))), 1e-12) << z;
  }
}

TEST(LogGamma, PolesRejected) {
  EXPECT_THROW(log_gamma(cplx(0.0, 0.0)), Error);
  EXPECT_THROW(log_gamma(cplx(-3.0, 0.0)), Error);
}

TEST(TableIntegral, ExactAndFrozen) {
  EXPECT_NEAR(table_integral(0.0, -1.0).real(), std::numbers::pi, 1e-13);
  EXPECT_LT(rel(table_integral(0.5, -1.7), 1.3910480336381476348), 1e-13);
  const cplx expected(0.010722691081400229152, -0.036682952794502880739);
  EXPECT_LT(rel(table_integral(cplx(0.2, 3.0), cplx(-2.0, 1.0)), expected), 1e-12);
}

TEST(TableIntegral, DomainChecked) {
  EXPECT_THROW(table_integral(-1.5, -3.0), Error);   // divergent at 0
  EXPECT_THROW(table_integral(1.0, -0.9), Error);    // divergent at infinity
  try {
    table_integral(0.0, -0.4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::domain);
  }
}

TEST(BesselKImag, MatchesFrozenValues) {
  struct Case {
    double R, u, v;
  };
  const Case cases[] = {
      {0.0, 1.0, 0.42102443824070833334},   {9.5, 1.0, 0.33646851263331898973},
      {9.5, 5.0, -0.87731436443371668807},  {9.5, 12.0, 0.14869406828359506019},
      {20.0, 3.0, 0.54053333364001586868},  {20.0, 25.0, 0.037408772540851838171},
      {40.0, 10.0, 0.23015510071986872318}, {12.17, 40.0, 2.6666875852088994285e-11},
  };
  for (const auto& c : cases) EXPECT_NEAR(bessel_k_imag(c.R, c.u), c.v, 1e-12 * std::max(1.0, std::abs(c.v))) << c.R << " " << c.u;
  // deep in the exponential tail the relative accuracy still holds
  EXPECT_NEAR(bessel_k_imag(12.17, 40.0) / 2.6666875852088994285e-11, 1.0, 1e-9);
}

TEST(BesselKImag, RangeErrors) {
  EXPECT_THROW(bessel_k_imag(5.0, 0.0), Error);
  EXPECT_THROW(bessel_k_imag(-1.0, 1.0), Error);
  try {
    bessel_k_imag(41.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported);
  }
}

TEST(ConicalLegendre, MatchesFrozenValues) {
  EXPECT_NEAR(conical_legendre(3.0, 0, 1.5), -0.19906528849848297827, 1e-13);
  EXPECT_NEAR(conical_legendre(3.0, 2, 2.0), 0.02715524939201597621, 1e-13);
  EXPECT_NEAR(conical_legendre(10.0, 1, 1.2), -0.021802330659024076016, 1e-13);
  EXPECT_NEAR(conical_legendre(5.0, -1, 3.0), -1.0330322639240841016, 1e-12);
  EXPECT_NEAR(conical_legendre(0.5, 0, 10.0), 0.33900655475286957751, 1e-13);
  EXPECT_NEAR(conical_legendre(7.0, 0, 1.0), 1.0, 1e-14);
}

TEST(ScaledComplex, ArithmeticStaysOnLogScale) {
  const auto a = ScaledComplex::from_log(cplx(-900.0, 0.3));
  const auto b = ScaledComplex::from_log(cplx(-850.0, -1.1));
  EXPECT_EQ(a.value(), cplx(0.0, 0.0));  // underflows as a double
  const auto q = a / b;
  EXPECT_NEAR(q.log_abs(), -50.0, 1e-12);
  EXPECT_NEAR(std::arg(q.mantissa), 1.4, 1e-12);
  EXPECT_NEAR((a * b.conj()).log_abs(), -1750.0, 1e-10);
  EXPECT_NEAR(relative_difference(a, a), 0.0, 1e-15);
  EXPECT_THROW(a / ScaledComplex{}, Error);
}
