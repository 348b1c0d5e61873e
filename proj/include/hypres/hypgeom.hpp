#pragma once

// Upper half-plane geometry: the PGL(2,R) action, distances, and the two
// kinds of orbits we restrict eigenfunctions to (closed geodesics and
// geodesic circles).

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "hypres/error.hpp"

namespace hypres {

using cplx = std::complex<double>;

// Element of PGL(2,R). Stored canonically: |det| = 1 and the first nonzero
// entry (in the order a, b, c, d) positive.
class GroupElement {
 public:
  GroupElement() : a_(1), b_(0), c_(0), d_(1) {}

  GroupElement(double a, double b, double c, double d) {
    const double det = a * d - b * c;
    if (!std::isfinite(det) || !std::isfinite(a) || !std::isfinite(b) ||
        !std::isfinite(c) || !std::isfinite(d))
      throw Error(ErrorKind::invalid_element, "non-finite matrix entry");
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (scale == 0.0 || std::abs(det) <= 1e-300 || std::abs(det) < 1e-14 * scale * scale)
      throw Error(ErrorKind::invalid_element, "matrix is not invertible");
    double s = 1.0 / std::sqrt(std::abs(det));
    const double first = a != 0.0 ? a : (b != 0.0 ? b : c);
    if (first < 0) s = -s;
    a_ = a * s;
    b_ = b * s;
    c_ = c * s;
    d_ = d * s;
  }

  static GroupElement diag(double x, double y) { return {x, 0.0, 0.0, y}; }

  // Rotation fixing i; acts on the boundary circle by angle 2*phi.
  static GroupElement rotation(double phi) {
    return {std::cos(phi), std::sin(phi), -std::sin(phi), std::cos(phi)};
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  std::array<double, 4> entries() const { return {a_, b_, c_, d_}; }

  double det() const { return a_ * d_ - b_ * c_; }
  double trace() const { return a_ + d_; }
  bool orientation_preserving() const { return det() > 0; }

  GroupElement operator*(const GroupElement& o) const {
    return {a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_,
            c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_};
  }

  GroupElement inverse() const { return {d_, -b_, -c_, a_}; }

  double max_entry_diff(const GroupElement& o) const {
    return std::max({std::abs(a_ - o.a_), std::abs(b_ - o.b_),
                     std::abs(c_ - o.c_), std::abs(d_ - o.d_)});
  }

 private:
  double a_, b_, c_, d_;
};

inline void require_upper(cplx z, const char* what) {
  if (!(z.imag() > 0.0) || !std::isfinite(z.real()))
    throw Error(ErrorKind::domain, std::string(what) + " must lie in the upper half-plane");
}

inline cplx mobius_act(const GroupElement& g, cplx z) {
  require_upper(z, "point");
  const cplx w = g.orientation_preserving() ? z : std::conj(z);
  const cplx den = g.c() * w + g.d();
  const cplx out = (g.a() * w + g.b()) / den;
  // Im(out) = |det| Im z / |den|^2; recompute it directly to keep it positive
  // when the real part cancels badly.
  return {out.real(), std::abs(g.det()) * z.imag() / std::norm(den)};
}

inline double hyperbolic_distance(cplx z, cplx w) {
  require_upper(z, "first point");
  require_upper(w, "second point");
  const double r = std::abs(z - w) / (2.0 * std::sqrt(z.imag() * w.imag()));
  return 2.0 * std::asinh(r);
}

// Closed A-orbit attached to a hyperbolic element gamma:
//   conjugator^{-1} * gamma * conjugator = diag(a, 1/a),  a > 1,
// parametrized by t(theta) = conjugator . (i * exp(length * theta)).
struct GeodesicOrbit {
  GroupElement gamma;
  GroupElement generator;  // diag(a, 1/a)
  GroupElement conjugator;
  double a = 1.0;
  double length = 0.0;
  double q = 0.0;  // 1 / ln a

  cplx point(double theta) const {
    return mobius_act(conjugator, cplx(0.0, std::exp(length * theta)));
  }
};

inline constexpr double kHyperbolicThreshold = 1e-9;

inline GeodesicOrbit geodesic_orbit_from_matrix(const GroupElement& gamma) {
  if (!gamma.orientation_preserving())
    throw Error(ErrorKind::not_hyperbolic, "orientation-reversing element has no closed A-orbit");
  double tr = gamma.trace();
  if (!(std::abs(tr) - 2.0 > kHyperbolicThreshold))
    throw Error(ErrorKind::not_hyperbolic, "|trace| <= 2 (elliptic or parabolic)", tr);
  // Work with the representative of positive trace; same element of PGL.
  const double sg = tr > 0 ? 1.0 : -1.0;
  const double A = sg * gamma.a(), B = sg * gamma.b(), C = sg * gamma.c(), D = sg * gamma.d();
  tr = A + D;
  const double disc = std::sqrt((tr - 2.0) * (tr + 2.0));
  const double lam_big = 0.5 * (tr + disc);
  const double lam_small = 1.0 / lam_big;

  auto eigvec = [&](double lam) -> std::array<double, 2> {
    // Rows of (M - lam I): (A-lam, B), (C, D-lam). Use the better conditioned one.
    std::array<double, 2> v1{B, lam - A};
    std::array<double, 2> v2{lam - D, C};
    const double n1 = std::hypot(v1[0], v1[1]);
    const double n2 = std::hypot(v2[0], v2[1]);
    auto& v = n1 >= n2 ? v1 : v2;
    const double n = std::max(n1, n2);
    return {v[0] / n, v[1] / n};
  };
  auto v1 = eigvec(lam_big);
  auto v2 = eigvec(lam_small);
  double det = v1[0] * v2[1] - v2[0] * v1[1];
  if (det < 0) {
    v2[0] = -v2[0];
    v2[1] = -v2[1];
    det = -det;
  }
  // Scale columns so that conjugator . i is the apex of the axis when both
  // endpoints are finite; a vertical axis keeps the unit scaling.
  double y = 1.0;
  if (v1[1] != 0.0 && v2[1] != 0.0) y = std::abs(v2[1] / v1[1]);
  const double s = std::sqrt(y);
  GeodesicOrbit out;
  out.gamma = gamma;
  out.conjugator = GroupElement(v1[0] * s, v2[0] / s, v1[1] * s, v2[1] / s);
  out.a = lam_big;
  out.generator = GroupElement::diag(lam_big, lam_small);
  out.length = 2.0 * std::log(lam_big);
  out.q = 1.0 / std::log(lam_big);
  return out;
}

// Geodesic circle {h k g . i : k in K}. Points are parametrized by
// theta in [0,1) through the rotation angle 2*pi*theta, which runs around the
// circle twice; this is the parametrization whose Fourier modes are the
// K-types, and it is why only even modes survive.
struct CircleOrbit {
  GroupElement h;
  GroupElement g;
  double radius = 0.0;
  cplx center{0.0, 1.0};

  cplx point(double theta) const {
    const double phi = 2.0 * std::numbers::pi * theta;
    return mobius_act(h * GroupElement::rotation(phi) * g, cplx(0.0, 1.0));
  }
};

inline CircleOrbit circle_orbit(cplx center, double radius) {
  require_upper(center, "center");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw Error(ErrorKind::domain, "radius must be positive", radius);
  const double x = center.real(), y = center.imag();
  const double sy = std::sqrt(y);
  CircleOrbit out;
  out.h = GroupElement(sy, x / sy, 0.0, 1.0 / sy);
  out.g = GroupElement::diag(std::exp(0.5 * radius), std::exp(-0.5 * radius));
  out.radius = radius;
  out.center = center;
  return out;
}

}  // namespace hypres
