#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hypres/hypgeom.hpp"

using namespace hypres;

TEST(GroupElement, CanonicalForm) {
  const GroupElement g(-2.0, -1.0, -1.0, -1.0);
  EXPECT_GT(g.a(), 0.0);
  EXPECT_NEAR(g.det(), 1.0, 1e-15);
  const GroupElement h(4.0, 0.0, 0.0, 1.0);  // det 4 -> scaled to det 1
  EXPECT_NEAR(h.a(), 2.0, 1e-15);
  EXPECT_NEAR(h.d(), 0.5, 1e-15);
  EXPECT_THROW(GroupElement(1.0, 2.0, 2.0, 4.0), Error);
  EXPECT_THROW(GroupElement(NAN, 0.0, 0.0, 1.0), Error);
}

TEST(Mobius, ActionIsAHomomorphism) {
  const GroupElement g(2.0, 1.0, 1.0, 1.0), h(1.0, -3.0, 0.5, -0.5);
  for (cplx z : {cplx(0.1, 0.5), cplx(-3.0, 2.0), cplx(0.0, 1e-3)}) {
    const cplx a = mobius_act(g * h, z), b = mobius_act(g, mobius_act(h, z));
    EXPECT_LT(std::abs(a - b), 1e-12 * std::abs(a)) << z;
    EXPECT_LT(std::abs(mobius_act(g.inverse(), mobius_act(g, z)) - z), 1e-12) << z;
  }
}

TEST(Mobius, IsometryOfTheMetric) {
  const GroupElement g(3.0, 2.0, 1.0, 1.0);
  const cplx z(0.2, 0.7), w(-1.0, 2.5);
  EXPECT_NEAR(hyperbolic_distance(mobius_act(g, z), mobius_act(g, w)), hyperbolic_distance(z, w), 1e-12);
  EXPECT_NEAR(hyperbolic_distance(cplx(0, 1), cplx(0, 2)), std::log(2.0), 1e-15);
  EXPECT_THROW(hyperbolic_distance(cplx(0, -1), cplx(0, 1)), Error);
}

TEST(GeodesicOrbit, ClosesUnderGamma) {
  const GroupElement gamma(2.0, 1.0, 1.0, 1.0);
  const auto o = geodesic_orbit_from_matrix(gamma);
  EXPECT_NEAR(o.length, 2.0 * std::acosh(1.5), 1e-14);
  EXPECT_NEAR(o.q, 1.0 / std::log(o.a), 1e-15);
  for (double th : {0.0, 0.17, 0.5, 0.93}) {
    const cplx z = o.point(th);
    EXPECT_LT(std::abs(mobius_act(gamma, z) - o.point(th + 1.0)), 1e-11 * std::abs(z)) << th;
    // consecutive points are length * dtheta apart in the hyperbolic metric
    EXPECT_NEAR(hyperbolic_distance(z, o.point(th + 0.01)), 0.01 * o.length, 1e-12);
  }
}

TEST(GeodesicOrbit, RejectsNonHyperbolic) {
  for (const GroupElement& g : {GroupElement(1.0, 1.0, 0.0, 1.0), GroupElement(0.0, -1.0, 1.0, 0.0),
                                GroupElement(2.0, 1.0, 1.0, -1.0)}) {
    try {
      geodesic_orbit_from_matrix(g);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::not_hyperbolic);
    }
  }
}

TEST(CircleOrbit, PointsAreConcyclicAndEquidistant) {
  const auto c = circle_orbit(cplx(0.3, 1.2), 0.8);
  const cplx p[4] = {c.point(0.0), c.point(0.11), c.point(0.26), c.point(0.4)};
  for (const cplx& z : p) EXPECT_NEAR(hyperbolic_distance(z, c.center), 0.8, 1e-12);
  // Euclidean concyclicity via the cross ratio being real
  const cplx cr = (p[0] - p[2]) * (p[1] - p[3]) / ((p[0] - p[3]) * (p[1] - p[2]));
  EXPECT_LT(std::abs(cr.imag()), 1e-9);
  // theta and theta + 1/2 land on the same point: double cover
  EXPECT_LT(std::abs(c.point(0.13) - c.point(0.63)), 1e-12);
}
