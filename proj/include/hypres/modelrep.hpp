#pragma once

// Line and circle models of the principal series V_lambda of PGL(2,R):
// the K-fixed vector, the group action, the equivariant model functionals
// d_s(v) = int |x|^{-1/2 - lambda/2 + s/2} v(x) dx, the spectral densities
// b_n (closed geodesics) and c_n (geodesic circles), and test vectors.
//
// Vectors are stored as even functions f on R^2 \ 0, homogeneous of degree
// lambda - 1. The line model is x -> f(x, 1); the circle model is
// theta -> f(cos 2 pi theta, sin 2 pi theta); the norm is the circle-model
// L^2 norm (1/2pi) int |f|^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "hypres/dft.hpp"
#include "hypres/error.hpp"
#include "hypres/hypgeom.hpp"
#include "hypres/quad.hpp"
#include "hypres/specfun.hpp"

namespace hypres {

struct SpectralParam {
  cplx lambda{0.0, 0.0};
  cplx mu{0.25, 0.0};
  bool principal = true;

  static SpectralParam from_lambda(cplx l) {
    return {l, (1.0 - l * l) / 4.0, l.real() == 0.0};
  }
  // mu = 1/4 + R^2  <=>  lambda = 2iR.
  static SpectralParam from_R(double R) { return from_lambda(cplx(0.0, 2.0 * R)); }
  double tau() const { return std::abs(lambda.imag()); }
};

// Branch point of the continuation of a line-model vector along the
// imaginary axis: |x| = radius, local behaviour |r - radius|^exponent.
struct AxisBranch {
  double radius = 1.0;
  cplx exponent{0.0, 0.0};
};

struct ModelVector {
  enum class Realization { line, circle };

  SpectralParam param;
  Realization realization = Realization::line;
  std::function<cplx(double, double)> plane;
  // Continuation of w(x) = v(x) + v(-x) along x = sign * i * r, reached from
  // Re x > 0. Called as axis(r, r - branch radius, sign); the offset is passed
  // separately so values next to the branch point keep full precision.
  // Optional; only used to rotate the model functional's contour.
  std::function<cplx(double, double, int)> axis;
  std::optional<AxisBranch> axis_branch;
  // Support of the line function in |x| when it is compact.
  std::optional<std::pair<double, double>> support;
  double scale = 1.0;  // |x| around which the line function changes shape

  cplx line(double x) const { return plane(x, 1.0); }
  cplx circle(double theta) const {
    const double phi = 2.0 * std::numbers::pi * theta;
    return plane(std::cos(phi), std::sin(phi));
  }
  cplx operator()(double x) const {
    return realization == Realization::line ? line(x) : circle(x);
  }
  ModelVector as(Realization r) const {
    ModelVector out = *this;
    out.realization = r;
    return out;
  }
};

inline void require_principal(const SpectralParam& p) {
  if (!p.principal)
    throw Error(ErrorKind::unsupported, "only principal series (Re lambda = 0) is supported",
                p.lambda.real());
}

// (1/2pi) int |f|^2 over the circle, or (1/pi) int |v|^2 dx on the line for
// compactly supported vectors (same quantity, different chart).
inline double representation_norm2(const ModelVector& v) {
  if (v.support) {
    auto f = [&](double x) -> cplx { return std::norm(v.line(x)) + std::norm(v.line(-x)); };
    AdaptiveOptions o;
    o.rel_tol = 1e-13;
    return integrate_adaptive(f, v.support->first, v.support->second, o).value.real() /
           std::numbers::pi;
  }
  auto f = [&](double th) -> cplx { return std::norm(v.circle(th)); };
  return integrate_periodic(f).value.real();
}

// K-fixed vector e0(x) = c (1 + x^2)^{(lambda-1)/2} with c fixed by unit norm.
inline ModelVector k_fixed_vector(const SpectralParam& p) {
  require_principal(p);
  const cplx t = 0.5 * (p.lambda - 1.0);
  ModelVector v;
  v.param = p;
  v.plane = [t](double X, double Y) -> cplx { return std::exp(t * std::log(X * X + Y * Y)); };
  const double c = 1.0 / std::sqrt(representation_norm2(v));
  v.plane = [t, c](double X, double Y) -> cplx {
    return c * std::exp(t * std::log(X * X + Y * Y));
  };
  v.axis = [t, c](double r, double dr, int sign) -> cplx {
    const double d = -dr * (r + 1.0);
    if (d > 0) return 2.0 * c * std::exp(t * std::log(d));
    if (d < 0)
      return 2.0 * c * std::exp(t * std::log(-d) + cplx(0.0, sign * std::numbers::pi) * t);
    return {std::numeric_limits<double>::infinity(), 0.0};
  };
  v.axis_branch = AxisBranch{1.0, t};
  return v;
}

inline ModelVector pi_action(const SpectralParam& p, const GroupElement& g, const ModelVector& v) {
  if (v.param.lambda != p.lambda)
    throw Error(ErrorKind::consistency, "vector belongs to a different representation");
  const GroupElement gi = g.inverse();
  // |det g| = 1 for canonical elements, so the determinant factor is 1.
  ModelVector out;
  out.param = p;
  out.realization = v.realization;
  out.plane = [gi, f = v.plane](double X, double Y) {
    return f(gi.a() * X + gi.b() * Y, gi.c() * X + gi.d() * Y);
  };
  out.scale = v.scale;
  if (g.b() == 0.0 && g.c() == 0.0 && g.a() > 0.0 && g.d() > 0.0) {
    // (pi(a) v)(x) = a^{lambda-1} v(x / a^2)
    const double a = g.a(), a2 = a * a;
    const cplx fac = std::exp((p.lambda - 1.0) * std::log(a));
    if (v.axis) {
      out.axis = [fac, a2, ax = v.axis](double r, double dr, int sign) {
        return fac * ax(r / a2, dr / a2, sign);
      };
      out.axis_branch = AxisBranch{v.axis_branch->radius * a2, v.axis_branch->exponent};
    }
    if (v.support) out.support = std::make_pair(v.support->first * a2, v.support->second * a2);
    out.scale = v.scale * a2;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model functional.

struct FunctionalOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  double log_range = 11.0;   // half-width of the log-variable window
  double branch_range = 26.0;  // log-distance resolved near an axis branch point
  double panel_phase = 3.0;    // radians of oscillation per initial panel
  bool allow_rotation = true;
};

inline cplx kernel_exponent(const SpectralParam& p, cplx s) {
  return -0.5 - 0.5 * p.lambda + 0.5 * s;
}

namespace detail {

inline cplx pow_pos(double x, cplx e) { return std::exp(e * std::log(x)); }

// Breakpoints follow a bound on the local phase rate, so each panel carries a
// few radians of oscillation. rate must be nonincreasing or constant on [a, b].
template <class Rate>
cplx integrate_oscillatory(const Integrand& F, double a, double b, Rate rate,
                           const FunctionalOptions& o) {
  AdaptiveOptions ao;
  ao.rel_tol = o.rel_tol;
  ao.abs_tol = o.abs_tol;
  ao.max_evaluations = 50'000'000;
  double x = a;
  while (true) {
    x += o.panel_phase / std::max(rate(x), 1.0);
    if (x >= b - 1e-9 * (b - a)) break;
    ao.breakpoints.push_back(x);
  }
  return integrate_adaptive(F, a, b, ao).value;
}

inline cplx integrate_oscillatory(const Integrand& F, double a, double b, double freq,
                                  const FunctionalOptions& o) {
  return integrate_oscillatory(F, a, b, [freq](double) { return freq; }, o);
}

}  // namespace detail

// d_s(v) as a scaled value; the contour is rotated onto the imaginary axis
// when |Im s| > |Im lambda|, where the real-line integrand would cancel to
// exponential accuracy.
inline ScaledComplex model_functional_scaled(const SpectralParam& p, cplx s, const ModelVector& v,
                                             const FunctionalOptions& o = {}) {
  if (v.param.lambda != p.lambda)
    throw Error(ErrorKind::consistency, "vector belongs to a different representation");
  if (std::abs(s.real()) > 1e-14)
    throw Error(ErrorKind::domain, "model functional needs a unitary character (Re s = 0)", s.real());
  const cplx kappa = kernel_exponent(p, s);
  const cplx d = p.lambda - 1.0;  // decay exponent of the line function
  auto w = [&](double x) { return v.line(x) + v.line(-x); };
  const double freq = std::abs(kappa.imag()) + std::abs(p.lambda.imag()) + 1.0;

  if (v.support) {
    const double lo = v.support->first, hi = v.support->second;
    auto F = [&](double x) -> cplx { return detail::pow_pos(x, kappa) * w(x); };
    AdaptiveOptions ao;
    ao.rel_tol = o.rel_tol;
    ao.abs_tol = o.abs_tol;
    const double spacing = 2.0 * lo / freq;
    const std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / spacing));
    for (std::size_t k = 1; k < n; ++k) ao.breakpoints.push_back(lo + (hi - lo) * k / n);
    return ScaledComplex::from_value(integrate_adaptive(F, lo, hi, ao).value);
  }

  const bool rotate = o.allow_rotation && v.axis && v.axis_branch &&
                      std::abs(s.imag()) > std::abs(p.lambda.imag());
  if (!rotate) {
    const double c = std::log(v.scale), U = o.log_range;
    auto F = [&](double u) -> cplx { return std::exp((kappa + 1.0) * u) * w(std::exp(u)); };
    cplx I = detail::integrate_oscillatory(F, c - U, c + U, freq, o);
    // Endpoint corrections from the leading power at 0 and at infinity.
    const double eps = std::exp(c - U), X = std::exp(c + U);
    I += w(eps) * detail::pow_pos(eps, kappa + 1.0) / (kappa + 1.0);
    I -= w(X) * detail::pow_pos(X, kappa + 1.0) / (kappa + d + 1.0);
    return ScaledComplex::from_value(I);
  }

  const int sg = kappa.imag() > 0 ? 1 : -1;
  const double rb = v.axis_branch->radius;
  const cplx pb = v.axis_branch->exponent;
  auto A = [&](double r) { return v.axis(r, r - rb, sg); };
  auto Ad = [&](double r, double dr) { return v.axis(r, dr, sg); };
  const double U = o.log_range, V = o.branch_range;
  cplx J = 0.0;
  {  // (0, rb/2]
    const double u1 = std::log(0.5 * rb), u0 = u1 - U;
    auto F = [&](double u) -> cplx { return std::exp((kappa + 1.0) * u) * A(std::exp(u)); };
    J += detail::integrate_oscillatory(F, u0, u1, freq, o);
    const double eps = std::exp(u0);
    J += A(eps) * detail::pow_pos(eps, kappa + 1.0) / (kappa + 1.0);
  }
  {  // [rb/2, rb): r = rb (1 - e^{-V})
    auto F = [&](double t) -> cplx {
      const double e = std::exp(-t), r = rb * (1.0 - e);
      return detail::pow_pos(r, kappa) * Ad(r, -rb * e) * (rb * e);
    };
    auto rate = [&](double t) {
      const double e = std::exp(-t);
      return std::abs(pb.imag()) + 1.0 + (freq - 1.0) * e / (1.0 - e);
    };
    J += detail::integrate_oscillatory(F, std::log(2.0), V, rate, o);
    const double delta = rb * std::exp(-V), r = rb - delta;
    const cplx G = detail::pow_pos(r, kappa) * Ad(r, -delta) / detail::pow_pos(delta, pb);
    J += G * detail::pow_pos(delta, pb + 1.0) / (pb + 1.0);
  }
  {  // (rb, 2 rb]: r = rb (1 + e^{-V})
    auto F = [&](double t) -> cplx {
      const double e = std::exp(-t), r = rb * (1.0 + e);
      return detail::pow_pos(r, kappa) * Ad(r, rb * e) * (rb * e);
    };
    auto rate = [&](double t) {
      const double e = std::exp(-t);
      return std::abs(pb.imag()) + 1.0 + (freq - 1.0) * e / (1.0 + e);
    };
    J += detail::integrate_oscillatory(F, 0.0, V, rate, o);
    const double delta = rb * std::exp(-V), r = rb + delta;
    const cplx G = detail::pow_pos(r, kappa) * Ad(r, delta) / detail::pow_pos(delta, pb);
    J += G * detail::pow_pos(delta, pb + 1.0) / (pb + 1.0);
  }
  {  // [2 rb, infinity)
    const double u0 = std::log(2.0 * rb), u1 = u0 + U;
    auto F = [&](double u) -> cplx { return std::exp((kappa + 1.0) * u) * A(std::exp(u)); };
    J += detail::integrate_oscillatory(F, u0, u1, freq, o);
    const double X = std::exp(u1);
    J -= A(X) * detail::pow_pos(X, kappa + 1.0) / (kappa + d + 1.0);
  }
  // x = sg * i * r:  x^kappa dx = e^{i sg pi kappa / 2} r^kappa * sg * i dr
  const cplx phase_part = std::polar(1.0, sg * 0.5 * std::numbers::pi * kappa.real());
  ScaledComplex out = ScaledComplex::from_value(cplx(0.0, sg) * phase_part * J);
  out.log_scale += -0.5 * std::numbers::pi * std::abs(kappa.imag());
  return out;
}

inline cplx model_functional(const SpectralParam& p, cplx s, const ModelVector& v,
                             const FunctionalOptions& o = {}) {
  return model_functional_scaled(p, s, v, o).value();
}

// ---------------------------------------------------------------------------
// Spectral densities.

enum class DensityKind { geodesic_b, circle_c };
enum class Regime { bulk, edge, tail };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::bulk: return "bulk";
    case Regime::edge: return "edge";
    case Regime::tail: return "tail";
  }
  return "?";
}

inline Regime classify_regime(double freq, double edge, double sigma) {
  if (freq <= (1.0 - sigma) * edge) return Regime::bulk;
  if (freq < (1.0 + sigma) * edge) return Regime::edge;
  return Regime::tail;
}

struct DensityEntry {
  long n = 0;
  ScaledComplex value;
  Regime regime = Regime::bulk;
};

// Default character lattice s_n = 2 pi i n q: the smallest step for which
// |a|^s is trivial on diag(a, 1/a) in the line model (x -> a^2 x). The ratio
// to the step "i n q" is kept in the table.
inline constexpr double kDefaultLatticeFactor = 2.0 * std::numbers::pi;

struct DensityTable {
  DensityKind kind = DensityKind::geodesic_b;
  SpectralParam param;
  double q = 0.0;
  double lattice_factor = kDefaultLatticeFactor;
  GroupElement g;
  double edge_constant = 0.0;
  double sigma = 0.1;
  std::map<long, DensityEntry> entries;

  cplx s(long n) const { return cplx(0.0, lattice_factor * q * static_cast<double>(n)); }
  const DensityEntry* find(long n) const {
    auto it = entries.find(n);
    return it == entries.end() ? nullptr : &it->second;
  }
  double max_log_abs() const {
    double m = -std::numeric_limits<double>::infinity();
    for (auto& [n, e] : entries) m = std::max(m, e.value.log_abs());
    return m;
  }
  std::string label() const {
    std::ostringstream os;
    os << (kind == DensityKind::geodesic_b ? "geodesic-b" : "circle-c");
    return os.str();
  }
};

inline ScaledComplex density_b_entry(const SpectralParam& p, cplx s) {
  require_principal(p);
  const cplx l = p.lambda;
  return ScaledComplex::from_log(log_gamma((1.0 - l + s) / 4.0) + log_gamma((1.0 - l - s) / 4.0) -
                                 log_gamma((1.0 - l) / 2.0));
}

inline DensityTable density_b(const SpectralParam& p, double q, long n_lo, long n_hi,
                              double lattice_factor = kDefaultLatticeFactor, double sigma = 0.1) {
  require_principal(p);
  if (!(q > 0.0)) throw Error(ErrorKind::domain, "q must be positive", q);
  DensityTable t;
  t.kind = DensityKind::geodesic_b;
  t.param = p;
  t.q = q;
  t.lattice_factor = lattice_factor;
  t.sigma = sigma;
  const double tau = p.tau();
  // The unit K-fixed vector has c = 1, so b_n is the bare Gamma quotient.
  for (long n = n_lo; n <= n_hi; ++n) {
    const cplx s = t.s(n);
    t.entries[n] = {n, density_b_entry(p, s), classify_regime(std::abs(s.imag()), tau, sigma)};
  }
  return t;
}

// D(theta) = |g^{-1} u_theta|^2, u_theta = (cos 2 pi theta, sin 2 pi theta).
inline double circle_stretch(const GroupElement& g, double theta) {
  const GroupElement gi = g.inverse();
  const double phi = 2.0 * std::numbers::pi * theta;
  const double x = gi.a() * std::cos(phi) + gi.b() * std::sin(phi);
  const double y = gi.c() * std::cos(phi) + gi.d() * std::sin(phi);
  return x * x + y * y;
}

inline double circle_log_stretch_derivative(const GroupElement& g, double theta) {
  const GroupElement gi = g.inverse();
  const double phi = 2.0 * std::numbers::pi * theta;
  const double c = std::cos(phi), s = std::sin(phi);
  const double x = gi.a() * c + gi.b() * s, y = gi.c() * c + gi.d() * s;
  const double dx = -gi.a() * s + gi.b() * c, dy = -gi.c() * s + gi.d() * c;
  return 2.0 * std::numbers::pi * 2.0 * (x * dx + y * dy) / (x * x + y * y);
}

// Edge constant c with the critical-point edge at |2 pi n| = c |lambda|:
// half the maximum of |d ln D / d theta|.
inline double circle_edge_constant(const GroupElement& g) {
  const int N = 4096;
  double best = 0.0, arg = 0.0;
  for (int k = 0; k < N; ++k) {
    const double v = std::abs(circle_log_stretch_derivative(g, static_cast<double>(k) / N));
    if (v > best) {
      best = v;
      arg = static_cast<double>(k) / N;
    }
  }
  double lo = arg - 1.0 / N, hi = arg + 1.0 / N;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double t) { return -std::abs(circle_log_stretch_derivative(g, t)); };
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo), f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-13) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1; x1 = hi - gr * (hi - lo); f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2; x2 = lo + gr * (hi - lo); f2 = f(x2);
    }
  }
  return 0.5 * std::max(best, -f(0.5 * (lo + hi)));
}

inline void require_noncompact(const GroupElement& g) {
  const cplx gi = mobius_act(g, cplx(0.0, 1.0));
  if (hyperbolic_distance(gi, cplx(0.0, 1.0)) < 1e-12)
    throw Error(ErrorKind::degenerate, "g lies in K: the circle is a point");
}

// Phase of the c_n integrand, (Im lambda / 2) ln D - 2 pi n theta.
inline PhaseReport circle_phase_report(const SpectralParam& p, const GroupElement& g, long n,
                                       const PhaseOptions& po = {}) {
  const double tau = p.lambda.imag();
  auto phase = [&](double th) {
    return 0.5 * tau * std::log(circle_stretch(g, th)) - 2.0 * std::numbers::pi * n * th;
  };
  auto amp = [&](double th) { return 1.0 / std::sqrt(circle_stretch(g, th)); };
  PhaseOptions o = po;
  o.derivative = [&](double th) {
    return 0.5 * tau * circle_log_stretch_derivative(g, th) - 2.0 * std::numbers::pi * n;
  };
  return analyze_phase(phase, amp, {0.0, 1.0, true}, o);
}

// Fourier coefficients of theta -> (pi(g) e0)(theta) in the circle model.
inline DensityTable density_c(const SpectralParam& p, const GroupElement& g, long n_lo, long n_hi,
                              double sigma = 0.1) {
  require_principal(p);
  require_noncompact(g);
  const ModelVector f = pi_action(p, g, k_fixed_vector(p)).as(ModelVector::Realization::circle);
  const long nmax = std::max(std::abs(n_lo), std::abs(n_hi));
  std::size_t N = 256;
  while (N < static_cast<std::size_t>(4 * nmax + 64)) N *= 2;
  auto sample = [&](std::size_t n) {
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = f.circle(static_cast<double>(k) / n);
    return fourier_coefficients(v);
  };
  std::vector<cplx> prev = sample(N);
  std::vector<cplx> cur;
  while (true) {
    N *= 2;
    cur = sample(N);
    double diff = 0.0, scale = 0.0;
    for (long n = -nmax; n <= nmax; ++n) {
      diff = std::max(diff, std::abs(mode(cur, n) - mode(prev, n)));
      scale = std::max(scale, std::abs(mode(cur, n)));
    }
    if (diff <= 1e-15 * std::max(scale, 1.0)) break;
    if (N > (std::size_t(1) << 24)) throw Error(ErrorKind::convergence_failure, "circle density did not converge", diff);
    prev.swap(cur);
  }
  DensityTable t;
  t.kind = DensityKind::circle_c;
  t.param = p;
  t.g = g;
  t.edge_constant = circle_edge_constant(g);
  t.sigma = sigma;
  const double edge = t.edge_constant * p.tau();
  for (long n = n_lo; n <= n_hi; ++n)
    t.entries[n] = {n, ScaledComplex::from_value(mode(cur, n)),
                    classify_regime(2.0 * std::numbers::pi * std::abs(static_cast<double>(n)), edge, sigma)};
  return t;
}

inline void write_density_csv(const DensityTable& t, std::ostream& os) {
  os << "n,re,im,abs2,log10_abs2,regime\n";
  os << std::setprecision(17);
  for (auto& [n, e] : t.entries) {
    const cplx v = e.value.value();
    os << n << ',' << v.real() << ',' << v.imag() << ',' << std::norm(v) << ','
       << e.value.log10_abs2() << ',' << to_string(e.regime) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Test vectors v_T(x) = T * bump(T (|x| - 1)).

struct Bump {
  static constexpr double half_width = 0.1;
  // int_{-1}^{1} exp(-1/(1-u^2)) du
  static constexpr double profile_integral = 0.44399381616807943782304892117055266;
  // int bump^2 for the unit-integral bump of half-width 0.1
  static constexpr double l2_squared = 6.7511681300969749151092170449802972;

  static double value(double y) {
    const double u = y / half_width;
    if (!(std::abs(u) < 1.0)) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u)) / (half_width * profile_integral);
  }
};

// Squared norm of v_T is c1 * T with this c1.
inline double test_vector_c1() { return 2.0 / std::numbers::pi * Bump::l2_squared; }

inline ModelVector test_vector(const SpectralParam& p, double T) {
  if (!(T >= 1.0)) throw Error(ErrorKind::domain, "test vector needs T >= 1", T);
  ModelVector v;
  v.param = p;
  const cplx d = p.lambda - 1.0;
  v.plane = [T, d](double X, double Y) -> cplx {
    if (Y == 0.0) return 0.0;
    const double x = X / Y;
    const double b = Bump::value(T * (std::abs(x) - 1.0));
    if (b == 0.0) return 0.0;
    return std::exp(d * std::log(std::abs(Y))) * (T * b);
  };
  v.support = std::make_pair(1.0 - Bump::half_width / T, 1.0 + Bump::half_width / T);
  return v;
}

// Variation of arg |x|^kappa over the support of v_T.
inline double kernel_phase_variation(const SpectralParam& p, cplx s, double T) {
  const double w = Bump::half_width / T;
  return std::abs(kernel_exponent(p, s).imag()) * std::log((1.0 + w) / (1.0 - w));
}

}  // namespace hypres
