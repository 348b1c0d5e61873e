#pragma once

// Laplace eigenfunctions: real spherical harmonics, flat torus modes, and
// Maass cusp forms on PSL(2,Z)\H located by Hejhal's collocation method.
// All are normalized to unit L^2 on their surface.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hypres/error.hpp"
#include "hypres/hypgeom.hpp"
#include "hypres/quad.hpp"
#include "hypres/specfun.hpp"
#include "json.hpp"

namespace hypres {

enum class Surface { sphere, torus, modular };
enum class Parity { even, odd };

inline const char* to_string(Surface s) {
  switch (s) {
    case Surface::sphere: return "sphere";
    case Surface::torus: return "torus";
    case Surface::modular: return "modular";
  }
  return "?";
}
inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

inline Parity parse_parity(const std::string& s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  throw Error(ErrorKind::parse, "parity must be \"even\" or \"odd\", got \"" + s + "\"");
}

// Chart coordinates: sphere (colatitude, longitude), torus (x1, x2) on the
// unit square, modular (x, y) in the upper half-plane.
struct SurfacePoint {
  double u = 0.0;
  double v = 0.0;
};

struct MaassForm {
  double R = 0.0;
  Parity parity = Parity::even;
  int M0 = 0;
  double Y = 0.0;                    // collocation height
  std::vector<double> coefficients;  // a_1..a_M0 with a_1 = 1
  double norm_factor = 1.0;          // multiplies the a_1 = 1 series to unit L^2
  double residual = 0.0;             // collocation residual at a second height
  double truncation_shift = 0.0;     // |R(M0 + 8) - R(M0)|
  double condition = 0.0;

  double mu() const { return 0.25 + R * R; }
};

struct Eigenfunction {
  Surface surface = Surface::sphere;
  double mu = 0.0;
  double R = 0.0;  // spectral parameter: mu = 1/4 + R^2 (modular), degree n (sphere)
  std::string label;
  std::function<double(const SurfacePoint&)> evaluator;
  std::shared_ptr<const MaassForm> maass;

  double operator()(const SurfacePoint& p) const { return evaluator(p); }
};

inline double evaluate(const Eigenfunction& phi, const SurfacePoint& p) { return phi.evaluator(p); }

// ---------------------------------------------------------------------------
// Sphere and torus.

// Orthonormal associated Legendre values Pbar_l^m(cos theta), l = m..n, with
// sum over the sphere of |Pbar e^{i m phi}|^2 = 1 (no Condon-Shortley sign).
inline double normalized_legendre(int n, int m, double theta) {
  const double x = std::cos(theta), s = std::sin(theta);
  double pmm = std::sqrt(1.0 / (4.0 * std::numbers::pi));
  for (int k = 1; k <= m; ++k) pmm *= std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  if (n == m) return pmm;
  double p1 = std::sqrt(2.0 * m + 3.0) * x * pmm;
  if (n == m + 1) return p1;
  double p0 = pmm;
  double a_prev = std::sqrt(2.0 * m + 3.0);
  for (int l = m + 2; l <= n; ++l) {
    const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
    const double p2 = a * (x * p1 - p0 / a_prev);
    p0 = p1;
    p1 = p2;
    a_prev = a;
  }
  return p1;
}

inline Eigenfunction sphere_harmonic(int n, int m) {
  if (n < 0 || std::abs(m) > n)
    throw Error(ErrorKind::domain, "sphere harmonic needs n >= 0 and |m| <= n", m);
  Eigenfunction e;
  e.surface = Surface::sphere;
  e.mu = static_cast<double>(n) * (n + 1);
  e.R = n;
  e.label = "Y_" + std::to_string(n) + "^" + std::to_string(m);
  const int am = std::abs(m);
  const double fac = m == 0 ? 1.0 : std::numbers::sqrt2;
  e.evaluator = [n, m, am, fac](const SurfacePoint& p) {
    const double ang = m > 0 ? std::cos(am * p.v) : (m < 0 ? std::sin(am * p.v) : 1.0);
    return fac * normalized_legendre(n, am, p.u) * ang;
  };
  return e;
}

inline Eigenfunction torus_mode(int k1, int k2) {
  Eigenfunction e;
  e.surface = Surface::torus;
  const double two_pi = 2.0 * std::numbers::pi;
  e.mu = two_pi * two_pi * (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
  e.R = std::sqrt(e.mu);
  e.label = "torus(" + std::to_string(k1) + "," + std::to_string(k2) + ")";
  if (k1 == 0 && k2 == 0)
    e.evaluator = [](const SurfacePoint&) { return 1.0; };
  else
    e.evaluator = [k1, k2, two_pi](const SurfacePoint& p) {
      return std::numbers::sqrt2 * std::cos(two_pi * (k1 * p.u + k2 * p.v));
    };
  return e;
}

// ---------------------------------------------------------------------------
// Modular surface.

inline constexpr double kModularFloor = 0.05;

// Pull z into {|x| <= 1/2, |z| >= 1}.
inline cplx pullback_modular(cplx z) {
  require_upper(z, "point");
  for (int it = 0; it < 10000; ++it) {
    z -= std::floor(z.real() + 0.5);
    if (std::norm(z) >= 1.0 - 1e-15) return z;
    z = -1.0 / z;
    z = {z.real(), std::abs(z.imag())};
  }
  throw Error(ErrorKind::convergence_failure, "modular reduction did not terminate");
}

namespace detail {

inline double parity_wave(Parity p, double t) { return p == Parity::even ? std::cos(t) : std::sin(t); }

// Scaled K-Bessel terms that cannot matter next to O(1) values are skipped.
inline double bessel_term(double R, double u) {
  if (u - 0.5 * std::numbers::pi * R > 80.0) return 0.0;
  return bessel_k_imag(R, u);
}

// sum_n a_n sqrt(y) K~(2 pi n y) cs(2 pi n x) with K~ = e^{pi R/2} K_{iR}.
inline double maass_series(double R, Parity parity, const std::vector<double>& a, cplx z) {
  const double x = z.real(), y = z.imag(), two_pi = 2.0 * std::numbers::pi;
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    const double K = bessel_term(R, two_pi * n * y);
    if (K == 0.0) break;
    sum += a[k] * K * parity_wave(parity, two_pi * n * x);
  }
  return std::sqrt(y) * sum;
}

}  // namespace detail

// Fourier series of the form without reduction; valid where the truncation
// is harmless (y above ~0.5).
inline double maass_series_value(const MaassForm& f, cplx z) {
  return f.norm_factor * detail::maass_series(f.R, f.parity, f.coefficients, z);
}

inline double maass_value(const MaassForm& f, cplx z) {
  if (!(z.imag() >= kModularFloor))
    throw Error(ErrorKind::accuracy_loss, "modular evaluation below the accuracy floor y = 0.05",
                z.imag());
  return maass_series_value(f, pullback_modular(z));
}

inline Eigenfunction modular_eigenfunction(std::shared_ptr<const MaassForm> f) {
  Eigenfunction e;
  e.surface = Surface::modular;
  e.mu = f->mu();
  e.R = f->R;
  std::ostringstream os;
  os << "maass(R=" << std::setprecision(10) << f->R << "," << to_string(f->parity) << ")";
  e.label = os.str();
  e.maass = f;
  e.evaluator = [f](const SurfacePoint& p) { return maass_value(*f, cplx(p.u, p.v)); };
  return e;
}

struct HejhalOptions {
  double scan_step = 0.02;
  double root_tol = 1e-12;
  double second_height = 0.93;  // Y2 = second_height * Y
  double agreement_tol = 1e-6;  // a_2..a_5 at the two heights must agree
  double max_condition = 1e13;
  double stability_tol = 1e-6;
  int extra_collocation = 12;   // Q = M0 + extra_collocation
  bool confirm = true;          // rerun with M0 + 8
};

inline int default_truncation(double R) {
  const double y_min = 0.5 * std::sqrt(3.0);
  return static_cast<int>(std::ceil((0.5 * std::numbers::pi * R + 36.0) / (2.0 * std::numbers::pi * y_min))) + 2;
}

namespace detail {

struct Collocation {
  Eigen::MatrixXd V;  // rows n = 1..M0, cols l = 1..M0
};

inline Collocation hejhal_matrix(double R, Parity parity, int M0, double Y, int Q) {
  const double two_pi = 2.0 * std::numbers::pi;
  Collocation c;
  c.V = Eigen::MatrixXd::Zero(M0, M0);
  std::vector<double> xm(Q);
  std::vector<cplx> zs(Q);
  for (int m = 0; m < Q; ++m) {
    xm[m] = (m + 0.5) / (2.0 * Q);
    zs[m] = pullback_modular(cplx(xm[m], Y));
  }
  // B(m, l) = sqrt(y*) K~(2 pi l y*) cs(2 pi l x*)
  Eigen::MatrixXd B(Q, M0), C(M0, Q);
  for (int m = 0; m < Q; ++m) {
    const double ys = zs[m].imag(), xs = zs[m].real();
    for (int l = 1; l <= M0; ++l)
      B(m, l - 1) = std::sqrt(ys) * bessel_term(R, two_pi * l * ys) * parity_wave(parity, two_pi * l * xs);
  }
  for (int n = 1; n <= M0; ++n)
    for (int m = 0; m < Q; ++m) C(n - 1, m) = parity_wave(parity, two_pi * n * xm[m]);
  c.V = -(2.0 / Q) * (C * B);
  for (int n = 1; n <= M0; ++n) c.V(n - 1, n - 1) += std::sqrt(Y) * bessel_k_imag(R, two_pi * n * Y);
  return c;
}

struct CollocationSolution {
  Eigen::VectorXd a;  // a_1..a_M0
  double condition = 0.0;
};

inline CollocationSolution hejhal_coefficients(double R, Parity parity, int M0, double Y, int Q,
                                               bool want_condition = false) {
  const Collocation c = hejhal_matrix(R, parity, M0, Y, Q);
  const int m = M0 - 1;
  Eigen::MatrixXd A = c.V.bottomRightCorner(m, m);
  Eigen::VectorXd rhs = -c.V.col(0).tail(m);
  // Row equilibration: row n carries the factor K~(2 pi n Y).
  for (int i = 0; i < m; ++i) {
    const double s = A.row(i).cwiseAbs().maxCoeff();
    if (s > 0) {
      A.row(i) /= s;
      rhs(i) /= s;
    }
  }
  CollocationSolution out;
  out.a.resize(M0);
  out.a(0) = 1.0;
  out.a.tail(m) = A.fullPivLu().solve(rhs);
  if (want_condition) {
    // Column scale of the unknowns is arbitrary; measure the equilibrated system.
    Eigen::MatrixXd S = A;
    for (int j = 0; j < m; ++j) {
      const double s = S.col(j).cwiseAbs().maxCoeff();
      if (s > 0) S.col(j) /= s;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    const auto& sv = svd.singularValues();
    out.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  }
  return out;
}

struct IndicatorValue {
  double value = 0.0;
  double agreement = 0.0;  // max_{k=2..5} |a_k(Y) - a_k(Y2)|
};

inline IndicatorValue hejhal_indicator(double R, Parity parity, int M0, double Y, int Q,
                                       const HejhalOptions& o) {
  const auto s1 = hejhal_coefficients(R, parity, M0, Y, Q);
  const auto s2 = hejhal_coefficients(R, parity, M0, o.second_height * Y, Q);
  IndicatorValue v;
  v.value = s1.a(1) - s2.a(1);
  for (int k = 1; k < std::min(M0, 5); ++k) v.agreement = std::max(v.agreement, std::abs(s1.a(k) - s2.a(k)));
  return v;
}

// Brent's method on the indicator; returns the root of a bracketed sign change.
template <class F>
double brent_root(F f, double a, double b, double fa, double fb, double tol) {
  if (fa * fb > 0) throw Error(ErrorKind::no_eigenvalue, "no sign change");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < 200; ++it) {
    if (fb * fc > 0) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  return b;
}

struct LocatedRoot {
  double R = 0.0;
  double agreement = 0.0;
};

// Genuine zeros of the indicator in [lo, hi]: sign changes whose two-height
// coefficients agree. Sign changes across poles fail the agreement test.
inline std::vector<LocatedRoot> hejhal_roots(double lo, double hi, Parity parity, int M0, double Y,
                                             const HejhalOptions& o, bool first_only) {
  const int Q = M0 + o.extra_collocation;
  auto f = [&](double R) { return hejhal_indicator(R, parity, M0, Y, Q, o).value; };
  const int steps = std::max(2, static_cast<int>(std::ceil((hi - lo) / o.scan_step)));
  std::vector<LocatedRoot> out;
  double r0 = lo, f0 = f(lo);
  for (int k = 1; k <= steps; ++k) {
    const double r1 = lo + (hi - lo) * k / steps, f1 = f(r1);
    if (f0 * f1 <= 0.0) {
      const double R = brent_root(f, r0, r1, f0, f1, o.root_tol);
      const auto iv = hejhal_indicator(R, parity, M0, Y, Q, o);
      if (iv.agreement < o.agreement_tol) {
        out.push_back({R, iv.agreement});
        if (first_only) return out;
      }
    }
    r0 = r1;
    f0 = f1;
  }
  return out;
}

// int_F phi^2 dx dy / y^2 over {|x| <= 1/2, |z| >= 1} for the series a.
inline double maass_norm2(double R, Parity parity, const std::vector<double>& a) {
  const double two_pi = 2.0 * std::numbers::pi;
  // y >= 1: orthogonality in x leaves sum a_n^2 K~(2 pi n y)^2 / (2 y).
  auto upper = [&](double y) -> cplx {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double K = bessel_term(R, two_pi * (k + 1.0) * y);
      if (K == 0.0) break;
      s += a[k] * a[k] * K * K;
    }
    return s / (2.0 * y);
  };
  AdaptiveOptions ao;
  ao.rel_tol = 1e-12;
  ao.abs_tol = 1e-300;
  const double top = integrate_adaptive(upper, 1.0, 1.0 + 60.0 / (4.0 * std::numbers::pi), ao).value.real();
  // sqrt(1 - x^2) <= y <= 1, doubled for x in [0, 1/2] (phi^2 is even in x).
  const GaussRule& g = gauss_legendre(40);
  double low = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double x = 0.25 + 0.25 * g.nodes[i];
    const double y0 = std::sqrt(1.0 - x * x);
    double inner = 0.0;
    for (int j = 0; j < 40; ++j) {
      const double y = 0.5 * (1.0 + y0) + 0.5 * (1.0 - y0) * g.nodes[j];
      const double v = maass_series(R, parity, a, cplx(x, y));
      inner += g.weights[j] * v * v / (y * y);
    }
    low += g.weights[i] * 0.5 * (1.0 - y0) * inner;
  }
  low *= 0.25 * 2.0;
  return top + low;
}

}  // namespace detail

// Locate a cusp form with R in [lo, hi] of the given parity. M0 <= 0 picks a
// truncation from R; Y is the collocation height (below sqrt(3)/2).
inline MaassForm hejhal_solve(double lo, double hi, Parity parity, int M0 = 0, double Y = 0.4,
                              const HejhalOptions& o = {}) {
  if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorKind::domain, "bracket must satisfy 0 < lo < hi", hi - lo);
  if (hi - lo > 1.0) throw Error(ErrorKind::domain, "bracket wider than 1", hi - lo);
  if (hi > 25.0) throw Error(ErrorKind::unsupported, "eigenvalues with R > 25 are out of range", hi);
  if (!(Y > 0.1 && Y < 0.5 * std::sqrt(3.0)))
    throw Error(ErrorKind::domain, "collocation height must lie in (0.1, sqrt(3)/2)", Y);
  if (M0 <= 0) M0 = default_truncation(hi);
  if (M0 < 6) throw Error(ErrorKind::domain, "truncation M0 must be at least 6", M0);

  const auto roots = detail::hejhal_roots(lo, hi, parity, M0, Y, o, true);
  if (roots.empty()) {
    std::ostringstream os;
    os << "no " << to_string(parity) << " cusp form with R in [" << lo << ", " << hi << "]";
    throw Error(ErrorKind::no_eigenvalue, os.str());
  }
  MaassForm f;
  f.R = roots.front().R;
  f.parity = parity;
  f.M0 = M0;
  f.Y = Y;
  const int Q = M0 + o.extra_collocation;
  const auto sol = detail::hejhal_coefficients(f.R, parity, M0, Y, Q, true);
  f.condition = sol.condition;
  if (!(sol.condition < o.max_condition))
    throw Error(ErrorKind::conditioning, "collocation system is ill-conditioned", sol.condition);
  f.coefficients.assign(sol.a.data(), sol.a.data() + sol.a.size());

  // Residual of the same coefficients in the system at the second height.
  {
    const auto c2 = detail::hejhal_matrix(f.R, parity, M0, o.second_height * Y, Q);
    const Eigen::VectorXd r = c2.V * sol.a;
    double res = 0.0;
    for (int n = 0; n < M0; ++n) {
      const double row = c2.V.row(n).cwiseAbs().maxCoeff();
      if (row > 0) res = std::max(res, std::abs(r(n)) / row);
    }
    f.residual = res / sol.a.cwiseAbs().maxCoeff();
  }

  if (o.confirm) {
    const double w = 0.01;
    const auto again = detail::hejhal_roots(f.R - w, f.R + w, parity, M0 + 8, Y, o, true);
    if (again.empty())
      throw Error(ErrorKind::convergence_failure, "eigenvalue not confirmed with truncation M0 + 8");
    f.truncation_shift = std::abs(again.front().R - f.R);
    if (!(f.truncation_shift < o.stability_tol))
      throw Error(ErrorKind::convergence_failure, "eigenvalue moved under truncation M0 + 8",
                  f.truncation_shift);
  }
  f.norm_factor = 1.0 / std::sqrt(detail::maass_norm2(f.R, parity, f.coefficients));
  return f;
}

// ---------------------------------------------------------------------------
// Checks shared by tests and the verify command.

// |Delta phi + mu phi| / (mu * scale) with a fourth-order difference stencil in
// the chart coordinates.
inline double laplace_residual(const Eigenfunction& phi, const SurfacePoint& p, double scale) {
  const double k = std::sqrt(phi.mu);
  auto d2 = [&](auto&& f, double h) {
    return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
  };
  const double f0 = phi(p);
  double lap = 0.0;
  switch (phi.surface) {
    case Surface::torus: {
      const double h = 0.05 / k;
      lap = d2([&](double t) { return phi({p.u + t, p.v}); }, h) +
            d2([&](double t) { return phi({p.u, p.v + t}); }, h);
      break;
    }
    case Surface::sphere: {
      const double h = 0.05 / std::max(k, 1.0);
      const double s = std::sin(p.u);
      const double fu = (-phi({p.u + 2 * h, p.v}) + 8 * phi({p.u + h, p.v}) - 8 * phi({p.u - h, p.v}) +
                         phi({p.u - 2 * h, p.v})) / (12 * h);
      lap = d2([&](double t) { return phi({p.u + t, p.v}); }, h) + std::cos(p.u) / s * fu +
            d2([&](double t) { return phi({p.u, p.v + t}); }, h) / (s * s);
      break;
    }
    case Surface::modular: {
      const double y = p.v, h = 0.05 * y / k;
      lap = y * y * (d2([&](double t) { return phi({p.u + t, p.v}); }, h) +
                     d2([&](double t) { return phi({p.u, p.v + t}); }, h));
      break;
    }
  }
  return std::abs(lap + phi.mu * f0) / (phi.mu * scale);
}

// max |phi| over a deterministic sample of the chart.
inline double sup_estimate(const Eigenfunction& phi, int samples = 4000) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    SurfacePoint p;
    switch (phi.surface) {
      case Surface::sphere:
        p = {std::acos(1.0 - 2.0 * U(rng)), 2.0 * std::numbers::pi * U(rng)};
        break;
      case Surface::torus:
        p = {U(rng), U(rng)};
        break;
      case Surface::modular: {
        const double x = U(rng) - 0.5;
        p = {x, std::sqrt(1.0 - x * x) + 1.5 * U(rng)};
        break;
      }
    }
    m = std::max(m, std::abs(phi(p)));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Coefficient cache: one JSON record per form.

inline constexpr int kCacheVersion = 1;

inline nlohmann::json to_json(const MaassForm& f) {
  return {{"format", "hypres-maass"},
          {"version", kCacheVersion},
          {"R", f.R},
          {"parity", to_string(f.parity)},
          {"M0", f.M0},
          {"Y", f.Y},
          {"norm_factor", f.norm_factor},
          {"residual", f.residual},
          {"truncation_shift", f.truncation_shift},
          {"condition", f.condition},
          {"coefficients", f.coefficients}};
}

inline MaassForm maass_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "hypres-maass")
      throw Error(ErrorKind::parse, "not a Maass form record");
    if (j.at("version").get<int>() != kCacheVersion)
      throw Error(ErrorKind::parse, "unsupported cache record version");
    MaassForm f;
    f.R = j.at("R").get<double>();
    f.parity = parse_parity(j.at("parity").get<std::string>());
    f.M0 = j.at("M0").get<int>();
    f.Y = j.at("Y").get<double>();
    f.norm_factor = j.at("norm_factor").get<double>();
    f.residual = j.at("residual").get<double>();
    f.truncation_shift = j.at("truncation_shift").get<double>();
    f.condition = j.at("condition").get<double>();
    f.coefficients = j.at("coefficients").get<std::vector<double>>();
    if (static_cast<int>(f.coefficients.size()) != f.M0)
      throw Error(ErrorKind::parse, "coefficient count does not match M0");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("malformed Maass record: ") + e.what());
  }
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::string>{}(content) & 0xffff);
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error(ErrorKind::input, "cannot write " + tmp.string());
    os << content;
    if (!os) throw Error(ErrorKind::input, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string cache_file_name(double lo, double hi, Parity parity) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << "maass_" << to_string(parity) << "_" << lo << "_" << hi
     << ".json";
  return os.str();
}

inline void save_maass(const MaassForm& f, const std::filesystem::path& path) {
  write_file_atomic(path, to_json(f).dump(2) + "\n");
}

inline std::optional<MaassForm> load_maass(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, "cannot parse " + path.string() + ": " + e.what());
  }
  return maass_from_json(j);
}

}  // namespace hypres
