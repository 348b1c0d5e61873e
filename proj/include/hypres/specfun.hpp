#pragma once

// Special functions: complex log-Gamma, the Beta-type table integral,
// exp(pi R/2) K_{iR}(u), and conical Legendre functions. Values that can
// leave the double range are carried as ScaledComplex.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "hypres/error.hpp"
#include "hypres/quad.hpp"

namespace hypres {

// value = mantissa * exp(log_scale), with |mantissa| kept near 1.
struct ScaledComplex {
  cplx mantissa{0.0, 0.0};
  double log_scale = 0.0;

  static ScaledComplex from_log(cplx logv) {
    return {std::polar(1.0, logv.imag()), logv.real()};
  }
  static ScaledComplex from_value(cplx v) {
    const double m = std::abs(v);
    if (m == 0.0) return {cplx(0.0), 0.0};
    return {v / m, std::log(m)};
  }
  ScaledComplex normalized() const {
    const double m = std::abs(mantissa);
    if (m == 0.0 || !std::isfinite(m)) return *this;
    return {mantissa / m, log_scale + std::log(m)};
  }
  bool is_zero() const { return mantissa == cplx(0.0); }
  cplx value() const { return is_zero() ? cplx(0.0) : mantissa * std::exp(log_scale); }
  double log_abs() const {
    return is_zero() ? -std::numeric_limits<double>::infinity()
                     : std::log(std::abs(mantissa)) + log_scale;
  }
  // log10 |value|^2, useful for tables that span hundreds of decades.
  double log10_abs2() const { return 2.0 * log_abs() / std::numbers::ln10; }
  double abs2() const { return std::exp(2.0 * log_abs()); }

  ScaledComplex operator*(const ScaledComplex& o) const {
    return ScaledComplex{mantissa * o.mantissa, log_scale + o.log_scale}.normalized();
  }
  ScaledComplex operator/(const ScaledComplex& o) const {
    if (o.is_zero()) throw Error(ErrorKind::domain, "division by zero scaled value");
    return ScaledComplex{mantissa / o.mantissa, log_scale - o.log_scale}.normalized();
  }
  ScaledComplex conj() const { return {std::conj(mantissa), log_scale}; }
};

// |a - b| / |b| without leaving the log scale.
inline double relative_difference(const ScaledComplex& a, const ScaledComplex& b) {
  if (b.is_zero()) return a.is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
  if (a.is_zero()) return 1.0;
  const cplx am = a.mantissa * std::exp(a.log_scale - b.log_scale);
  return std::abs(am - b.mantissa) / std::abs(b.mantissa);
}

inline void require_finite(cplx z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw Error(ErrorKind::domain, std::string(what) + " is not finite");
}

// ---------------------------------------------------------------------------
// log Gamma: upward recurrence to Re w >= 15, then the Stirling series.
// Principal branch (analytic continuation from the positive axis, cut along
// the negative axis).

inline cplx log_gamma(cplx z) {
  require_finite(z, "log_gamma argument");
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
    std::ostringstream os;
    os << "Gamma has a pole at z = " << z.real();
    throw Error(ErrorKind::pole, os.str(), z.real());
  }
  cplx w = z;
  cplx shift = 0.0;
  while (w.real() < 15.0) {
    shift += std::log(w);
    w += 1.0;
  }
  static constexpr double B[] = {1.0 / 6.0,      -1.0 / 30.0,     1.0 / 42.0,
                                 -1.0 / 30.0,    5.0 / 66.0,      -691.0 / 2730.0,
                                 7.0 / 6.0,      -3617.0 / 510.0, 43867.0 / 798.0,
                                 -174611.0 / 330.0};
  const cplx inv = 1.0 / w;
  const cplx inv2 = inv * inv;
  cplx term = inv;
  cplx series = 0.0;
  for (int k = 1; k <= 10; ++k) {
    series += B[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * term;
    term *= inv2;
  }
  const cplx lg = (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * std::numbers::pi) + series;
  return lg - shift;
}

inline cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

// log of  int_R |x|^s (1+x^2)^t dx = Gamma((s+1)/2) Gamma(-t-(s+1)/2) / Gamma(-t).
inline cplx log_table_integral(cplx s, cplx t) {
  require_finite(s, "s");
  require_finite(t, "t");
  if (!(s.real() > -1.0))
    throw Error(ErrorKind::domain, "table integral diverges at 0: need Re s > -1", s.real());
  if (!(t.real() + 0.5 * (s.real() + 1.0) < 0.0))
    throw Error(ErrorKind::domain, "table integral diverges at infinity: need Re t + Re(s+1)/2 < 0",
                t.real() + 0.5 * (s.real() + 1.0));
  const cplx h = 0.5 * (s + 1.0);
  return log_gamma(h) + log_gamma(-t - h) - log_gamma(-t);
}

inline cplx table_integral(cplx s, cplx t) { return std::exp(log_table_integral(s, t)); }

// ---------------------------------------------------------------------------
// exp(pi R / 2) K_{iR}(u).
//
// K_{iR}(u) = Re int_0^inf exp(-u cosh t + i R t) dt. The integrand is entire
// and decays in the strip 0 <= Im t < pi/2, so the path moves to
// Im t = pi/2 - eps; the vertical leg contributes only to the imaginary
// part. On the shifted line the scaled integrand is
//   exp(R eps - u sin(eps) cosh s) cos(R s - u cos(eps) sinh s).
// eps is taken as large as possible while R eps - u sin eps stays within 2 of
// its minimum over [0, pi/2], which bounds the cancellation.

inline constexpr double kBesselMaxOrder = 40.0;

inline double bessel_k_imag(double R, double u) {
  if (!(u > 0.0) || !std::isfinite(u)) throw Error(ErrorKind::domain, "bessel_k_imag needs u > 0", u);
  if (!(R >= 0.0)) throw Error(ErrorKind::domain, "bessel_k_imag needs R >= 0", R);
  if (R > kBesselMaxOrder) throw Error(ErrorKind::unsupported, "order above supported range", R);
  constexpr double half_pi = 0.5 * std::numbers::pi;
  auto f = [&](double e) { return R * e - u * std::sin(e); };
  const double e_star = R >= u ? 0.0 : std::acos(R / u);
  const double f_star = f(e_star);
  double eps;
  if (f(half_pi) <= f_star + 2.0) {
    eps = half_pi;
  } else {
    double lo = e_star, hi = half_pi;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) <= f_star + 2.0 ? lo : hi) = mid;
    }
    eps = lo;
  }
  const double se = std::sin(eps), ce = std::cos(eps);
  const double top = R * eps;
  // Truncate once the amplitude is exp(-40) below the minimal line height.
  const double ch_max = (top - f_star + 40.0) / (u * se);
  const double s_max = std::acosh(std::max(ch_max, 1.0)) + 1e-3;
  const GaussRule& g = gauss_legendre(16);
  double sum = 0.0;
  double s = 0.0;
  while (s < s_max) {
    double w = 4.0 / (R + u * std::cosh(s) + 1.0);
    w = std::min({w, 1.0, s_max - s});
    if (s_max - s - w < 1e-3 * w) w = s_max - s;
    const double mid = s + 0.5 * w;
    double ps = 0.0;
    for (int k = 0; k < 16; ++k) {
      const double x = mid + 0.5 * w * g.nodes[k];
      const double ex = std::exp(x);
      const double ch = 0.5 * (ex + 1.0 / ex), sh = 0.5 * (ex - 1.0 / ex);
      ps += g.weights[k] * std::exp(top - u * se * ch) * std::cos(R * x - u * ce * sh);
    }
    sum += 0.5 * w * ps;
    s += w;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Conical Legendre function P^{-n}_{-1/2+it}(x), x >= 1, from the Laplace
// type integral
//   P^{-m}_nu(x) = Gamma(nu-m+1)/(pi Gamma(nu+1))
//                  int_0^pi (x + sqrt(x^2-1) cos phi)^nu cos(m phi) dphi,
// normalized so that the n = 0 function equals 1 at x = 1.

inline double conical_legendre(double t, int n, double x) {
  if (!(x >= 1.0) || !std::isfinite(x)) throw Error(ErrorKind::domain, "conical_legendre needs x >= 1", x);
  const int m = std::abs(n);
  const cplx nu(-0.5, t);
  const double sx = std::sqrt((x - 1.0) * (x + 1.0));
  // The integrand is even and 2pi-periodic in phi, so the trapezoid rule on
  // the full circle converges spectrally.
  auto integrand = [&](double theta) -> cplx {
    const double phi = 2.0 * std::numbers::pi * theta;
    const double base = x + sx * std::cos(phi);
    return std::exp(nu * std::log(base)) * std::cos(m * phi);
  };
  PeriodicOptions po;
  po.rel_tol = 1e-14;
  po.abs_tol = 1e-300;
  const cplx mean = integrate_periodic(integrand, po).value;  // (1/pi) int_0^pi
  cplx ratio = 1.0;
  if (n >= 0) {
    // Gamma(nu - m + 1) / Gamma(nu + 1)
    for (int k = 1; k <= m; ++k) ratio /= (nu + 1.0 - static_cast<double>(k));
  } else {
    // P^{m}: Gamma(nu + m + 1) / Gamma(nu + 1)
    for (int k = 1; k <= m; ++k) ratio *= (nu + static_cast<double>(k));
  }
  return (ratio * mean).real();
}

}  // namespace hypres
