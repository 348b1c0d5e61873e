#pragma once

// Restrictions of eigenfunctions to closed curves, their Fourier periods,
// the coefficients a_n = p_n / density(n), and the average and exponent
// checks built on them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hypres/dft.hpp"
#include "hypres/eigen.hpp"
#include "hypres/error.hpp"
#include "hypres/hypgeom.hpp"
#include "hypres/modelrep.hpp"
#include "hypres/quad.hpp"
#include "json.hpp"

namespace hypres {

enum class CurveKind { geodesic, circle, sphere_equator, torus_horizontal, synthetic };

inline const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::geodesic: return "geodesic";
    case CurveKind::circle: return "circle";
    case CurveKind::sphere_equator: return "sphere-equator";
    case CurveKind::torus_horizontal: return "torus-horizontal";
    case CurveKind::synthetic: return "synthetic";
  }
  return "?";
}

struct Curve {
  CurveKind kind = CurveKind::synthetic;
  std::string id;
  double length = 1.0;  // arc length of the curve
  int covering = 1;     // times theta in [0,1) runs around it
  std::function<SurfacePoint(double)> point;
  std::optional<GeodesicOrbit> geodesic;
  std::optional<CircleOrbit> circle;

  double traversed_length() const { return covering * length; }
};

inline constexpr double kMinCircleRadius = 1e-3;
inline constexpr double kMinGeodesicLength = 1e-2;

// theta0 shifts the basepoint along the orbit: t(theta + theta0).
inline Curve geodesic_curve(const GroupElement& gamma, double theta0 = 0.0) {
  Curve c;
  c.kind = CurveKind::geodesic;
  c.geodesic = geodesic_orbit_from_matrix(gamma);
  if (c.geodesic->length < kMinGeodesicLength)
    throw Error(ErrorKind::degenerate, "closed geodesic shorter than 1e-2", c.geodesic->length);
  std::ostringstream os;
  os << "geodesic[" << gamma.a() << "," << gamma.b() << "," << gamma.c() << "," << gamma.d() << "]";
  c.length = c.geodesic->length;
  if (theta0 != 0.0) os << "@" << theta0;
  c.id = os.str();
  c.point = [o = *c.geodesic, theta0](double th) {
    const cplx z = o.point(th + theta0);
    return SurfacePoint{z.real(), z.imag()};
  };
  return c;
}

inline Curve circle_curve(cplx center, double radius) {
  if (radius < kMinCircleRadius) throw Error(ErrorKind::degenerate, "circle radius below 1e-3", radius);
  Curve c;
  c.kind = CurveKind::circle;
  c.circle = circle_orbit(center, radius);
  std::ostringstream os;
  os << "circle[" << center.real() << "," << center.imag() << ";" << radius << "]";
  c.id = os.str();
  c.length = 2.0 * std::numbers::pi * std::sinh(radius);
  c.covering = 2;
  c.point = [o = *c.circle](double th) {
    const cplx z = o.point(th);
    return SurfacePoint{z.real(), z.imag()};
  };
  return c;
}

inline Curve sphere_equator() {
  Curve c;
  c.kind = CurveKind::sphere_equator;
  c.id = "equator";
  c.length = 2.0 * std::numbers::pi;
  c.point = [](double th) { return SurfacePoint{0.5 * std::numbers::pi, 2.0 * std::numbers::pi * th}; };
  return c;
}

// {x2 = height} on the unit square torus.
inline Curve torus_horizontal(double height = 0.0) {
  Curve c;
  c.kind = CurveKind::torus_horizontal;
  c.id = "torus-x2=" + std::to_string(height);
  c.length = 1.0;
  c.point = [height](double th) { return SurfacePoint{th, height}; };
  return c;
}

inline void require_compatible(const Eigenfunction& phi, const Curve& c) {
  const bool ok = (phi.surface == Surface::modular &&
                   (c.kind == CurveKind::geodesic || c.kind == CurveKind::circle)) ||
                  (phi.surface == Surface::sphere && c.kind == CurveKind::sphere_equator) ||
                  (phi.surface == Surface::torus && c.kind == CurveKind::torus_horizontal);
  if (!ok)
    throw Error(ErrorKind::input, std::string("curve ") + to_string(c.kind) + " does not lie on the " +
                                      to_string(phi.surface));
}

struct RestrictionProfile {
  Curve curve;
  std::string label;
  Surface surface = Surface::sphere;
  double mu = 0.0;
  double R = 0.0;
  std::vector<double> samples;  // phi(t(k / N)), k = 0..N-1
  double length = 1.0;
  // theta -> phi(t(theta)); kept for off-grid checks.
  std::function<double(double)> sampler;

  std::size_t size() const { return samples.size(); }
};

struct RestrictOptions {
  std::size_t min_nodes = 256;
  std::size_t max_nodes = std::size_t(1) << 20;
  double tol = 1e-12;  // change of the low modes under doubling, relative to the rms
};

namespace detail {

inline std::vector<cplx> profile_coefficients(const std::vector<double>& s) {
  std::vector<cplx> v(s.begin(), s.end());
  return fourier_coefficients(v);
}

}  // namespace detail

// Samples phi along the curve on a power-of-two grid, doubled until the low
// Fourier modes settle and the upper half of the spectrum is negligible.
inline RestrictionProfile restrict(const Eigenfunction& phi, const Curve& curve,
                                   const RestrictOptions& o = {}) {
  require_compatible(phi, curve);
  RestrictionProfile prof;
  prof.curve = curve;
  prof.label = phi.label;
  prof.surface = phi.surface;
  prof.mu = phi.mu;
  prof.R = phi.R;
  prof.length = curve.length;
  auto sample = [&](std::size_t N, const std::vector<double>* coarse) {
    std::vector<double> s(N);
    for (std::size_t k = 0; k < N; ++k) {
      // Even nodes coincide with the previous grid.
      if (coarse && k % 2 == 0) {
        s[k] = (*coarse)[k / 2];
        continue;
      }
      s[k] = phi(curve.point(static_cast<double>(k) / N));
    }
    return s;
  };
  std::size_t N = o.min_nodes;
  std::vector<double> cur = sample(N, nullptr);
  while (true) {
    std::vector<double> fine = sample(2 * N, &cur);
    const auto c0 = detail::profile_coefficients(cur);
    const auto c1 = detail::profile_coefficients(fine);
    double total = 0.0, high = 0.0, diff = 0.0;
    const long M = static_cast<long>(N);
    for (long n = -M; n < M; ++n) {
      const double e = std::norm(mode(c1, n));
      total += e;
      if (std::abs(n) > M / 4) high += e;
    }
    for (long n = -M / 4; n <= M / 4; ++n) diff = std::max(diff, std::abs(mode(c1, n) - mode(c0, n)));
    const double rms = std::sqrt(total);
    cur.swap(fine);
    N *= 2;
    if (diff <= o.tol * std::max(rms, 1e-300) && high <= o.tol * o.tol * std::max(total, 1e-300)) break;
    if (rms == 0.0) break;
    if (2 * N > o.max_nodes)
      throw Error(ErrorKind::resolution, "restriction did not resolve within the node budget", diff / rms);
  }
  prof.samples = std::move(cur);
  prof.sampler = [phi, pt = curve.point](double th) { return phi(pt(th)); };
  return prof;
}

// Profile of an explicit periodic function on N nodes, for synthetic data.
inline RestrictionProfile profile_from_function(std::function<double(double)> f, std::size_t N,
                                                double length = 1.0, std::string label = "synthetic") {
  if (N < 256 || (N & (N - 1)) != 0)
    throw Error(ErrorKind::input, "profile grid must be a power of two >= 256", static_cast<double>(N));
  RestrictionProfile p;
  p.label = std::move(label);
  p.curve.length = length;
  p.length = length;
  p.samples.resize(N);
  for (std::size_t k = 0; k < N; ++k) p.samples[k] = f(static_cast<double>(k) / N);
  p.sampler = std::move(f);
  return p;
}

struct PeriodEntry {
  long n = 0;
  cplx p_hat;  // int_0^1 phi(t(theta)) e^{-2 pi i n theta} dtheta
  cplx p;      // traversed length * p_hat
  std::optional<ScaledComplex> a;
  std::string flag;
};

struct PeriodTable {
  std::string label;
  std::string curve_id;
  CurveKind curve_kind = CurveKind::synthetic;
  Surface surface = Surface::sphere;
  double mu = 0.0;
  double R = 0.0;
  double length = 1.0;
  double traversed_length = 1.0;
  std::size_t nodes = 0;
  double mass = 0.0;             // int_0^1 |phi(t(theta))|^2 dtheta, independent quadrature
  double spectral_energy = 0.0;  // sum over all modes |p_hat|^2
  std::map<long, PeriodEntry> entries;
  std::optional<DensityTable> density;

  double plancherel_error() const {
    return mass > 0 ? std::abs(spectral_energy - mass) / mass : std::abs(spectral_energy);
  }
  // int over the curve of |phi|^2 in arc length.
  double restriction_norm2() const { return length * mass; }
  const PeriodEntry* find(long n) const {
    auto it = entries.find(n);
    return it == entries.end() ? nullptr : &it->second;
  }
  double partial_sum(double T) const {
    double s = 0.0;
    for (auto& [n, e] : entries)
      if (std::abs(static_cast<double>(n)) <= T && e.a) s += e.a->abs2();
    return s;
  }
};

inline PeriodTable periods(const RestrictionProfile& prof, long n_lo, long n_hi) {
  if (n_hi < n_lo) throw Error(ErrorKind::input, "empty mode range");
  const std::size_t N = prof.samples.size();
  if (N < 256 || (N & (N - 1)) != 0)
    throw Error(ErrorKind::input, "profile grid must be a power of two >= 256", static_cast<double>(N));
  const long half = static_cast<long>(N / 2);
  if (std::max(std::abs(n_lo), std::abs(n_hi)) >= half)
    throw Error(ErrorKind::resolution, "mode range exceeds the profile resolution", static_cast<double>(N));
  const auto c = detail::profile_coefficients(prof.samples);
  PeriodTable t;
  t.label = prof.label;
  t.curve_id = prof.curve.id;
  t.curve_kind = prof.curve.kind;
  t.surface = prof.surface;
  t.mu = prof.mu;
  t.R = prof.R;
  t.length = prof.length;
  t.traversed_length = prof.curve.covering * prof.length;
  t.nodes = N;
  for (const auto& v : c) t.spectral_energy += std::norm(v);
  // The mass comes from Gauss-Kronrod panels on the sampled function itself,
  // so it shares no nodes with the FFT grid.
  if (prof.sampler) {
    AdaptiveOptions ao;
    ao.rel_tol = 1e-11;
    ao.abs_tol = 1e-300;
    const std::size_t panels = std::max<std::size_t>(N / 4, 16);
    for (std::size_t k = 1; k < panels; ++k) ao.breakpoints.push_back(static_cast<double>(k) / panels);
    auto f = [&](double th) -> cplx { return std::norm(prof.sampler(th)); };
    t.mass = integrate_adaptive(f, 0.0, 1.0, ao).value.real();
  } else {
    for (double v : prof.samples) t.mass += v * v;
    t.mass /= static_cast<double>(N);
  }
  for (long n = n_lo; n <= n_hi; ++n) {
    PeriodEntry e;
    e.n = n;
    e.p_hat = mode(c, n);
    e.p = t.traversed_length * e.p_hat;
    t.entries[n] = e;
  }
  return t;
}

struct ExtractOptions {
  double threshold = 1e-12;   // relative to max |density|
  double parity_tol = 1e-8;   // odd circle modes, relative to the rms of the profile
};

inline PeriodTable extract_coefficients(PeriodTable t, const DensityTable& d, const ExtractOptions& o = {}) {
  if (t.surface == Surface::modular) {
    const cplx lam(0.0, 2.0 * t.R);
    if (std::abs(d.param.lambda - lam) > 1e-9 * std::max(1.0, std::abs(lam)))
      throw Error(ErrorKind::consistency, "density computed at a different spectral parameter",
                  d.param.lambda.imag());
  }
  if (d.kind == DensityKind::circle_c && t.curve_kind == CurveKind::geodesic)
    throw Error(ErrorKind::consistency, "circle density applied to a geodesic table");
  if (d.kind == DensityKind::geodesic_b && t.curve_kind == CurveKind::circle)
    throw Error(ErrorKind::consistency, "geodesic density applied to a circle table");
  if (d.kind == DensityKind::circle_c) {
    const double rms = std::sqrt(std::max(t.mass, 0.0));
    for (auto& [n, e] : t.entries) {
      if (n % 2 != 0 && std::abs(e.p_hat) > o.parity_tol * std::max(rms, 1e-300)) {
        std::ostringstream os;
        os << "odd circle mode n = " << n << " does not vanish (|p_n| = " << std::abs(e.p_hat) << ")";
        throw Error(ErrorKind::structural_inconsistency, os.str(), std::abs(e.p_hat));
      }
    }
  }
  const double floor = d.max_log_abs() + std::log(o.threshold);
  for (auto& [n, e] : t.entries) {
    const DensityEntry* de = d.find(n);
    e.a.reset();
    if (!de) {
      e.flag = "density not computed";
      continue;
    }
    if (de->value.is_zero() || de->value.log_abs() < floor) {
      e.flag = "near-zero model density";
      continue;
    }
    e.flag.clear();
    e.a = ScaledComplex::from_value(e.p_hat) / de->value;
  }
  t.density = d;
  return t;
}

// ---------------------------------------------------------------------------
// Average bound sum_{|n| <= T} |a_n|^2 <= C max(T, sqrt(mu)).

struct AverageBoundReport {
  std::vector<double> T_grid;
  std::vector<std::string> labels;
  std::vector<double> mu;
  std::vector<std::vector<double>> ratio;  // [form][T]
  double constant = 0.0;                   // max ratio
  double growth_T = 1.0;                   // max ratio(T') / ratio(T), T' > T
  double growth_forms = 1.0;               // max ratio(mu') / ratio(mu), mu' > mu
  double variation_T = 1.0;                // max / min along T
  double variation_forms = 1.0;            // max / min across forms
  double allowed_growth = 3.0;
  bool monotone = true;                    // partial sums nondecreasing in T
  bool pass = false;
};

inline AverageBoundReport check_average_bound(const std::vector<PeriodTable>& tables,
                                              const std::vector<double>& T_grid,
                                              double allowed_growth = 3.0) {
  if (tables.empty()) throw Error(ErrorKind::input, "no period tables");
  if (tables.size() < 2) throw Error(ErrorKind::input, "average bound needs at least 2 eigenfunctions");
  if (T_grid.size() < 3) throw Error(ErrorKind::input, "average bound needs at least 3 values of T");
  AverageBoundReport r;
  r.T_grid = T_grid;
  std::sort(r.T_grid.begin(), r.T_grid.end());
  r.allowed_growth = allowed_growth;
  std::vector<std::size_t> order(tables.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return tables[a].mu < tables[b].mu; });
  for (auto i : order) {
    const PeriodTable& t = tables[i];
    if (t.entries.empty()) throw Error(ErrorKind::input, "empty period table " + t.label);
    r.labels.push_back(t.label);
    r.mu.push_back(t.mu);
    std::vector<double> row;
    double prev = -1.0;
    for (double T : r.T_grid) {
      const double s = t.partial_sum(T);
      if (s < prev) r.monotone = false;
      prev = s;
      row.push_back(s / std::max(T, std::sqrt(t.mu)));
    }
    r.ratio.push_back(row);
  }
  const std::size_t F = r.ratio.size(), K = r.T_grid.size();
  auto grow = [](double lo, double hi) { return lo > 0 ? hi / lo : (hi > 0 ? INFINITY : 1.0); };
  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t i = 0; i < K; ++i) {
      r.constant = std::max(r.constant, r.ratio[f][i]);
      for (std::size_t j = i + 1; j < K; ++j) {
        r.growth_T = std::max(r.growth_T, grow(r.ratio[f][i], r.ratio[f][j]));
        const double mx = std::max(r.ratio[f][i], r.ratio[f][j]), mn = std::min(r.ratio[f][i], r.ratio[f][j]);
        r.variation_T = std::max(r.variation_T, grow(mn, mx));
      }
      for (std::size_t g = f + 1; g < F; ++g) {
        r.growth_forms = std::max(r.growth_forms, grow(r.ratio[f][i], r.ratio[g][i]));
        const double mx = std::max(r.ratio[f][i], r.ratio[g][i]), mn = std::min(r.ratio[f][i], r.ratio[g][i]);
        r.variation_forms = std::max(r.variation_forms, grow(mn, mx));
      }
    }
  r.pass = r.monotone && r.growth_T <= allowed_growth && r.growth_forms <= allowed_growth &&
           std::isfinite(r.constant);
  return r;
}

// ---------------------------------------------------------------------------
// Restriction exponents.

struct ExponentFit {
  double exponent = 0.0;
  double constant = 0.0;  // exp(intercept)
  double residual = 0.0;  // rms of log residuals
  double bound_exponent = 0.0;
  double bound_constant = 0.0;  // max p / mu^bound_exponent
};

inline ExponentFit fit_restriction_exponent(const std::vector<std::pair<double, double>>& pairs,
                                            double bound_exponent = 0.25) {
  if (pairs.size() < 5) throw Error(ErrorKind::fit, "exponent fit needs at least 5 pairs",
                                    static_cast<double>(pairs.size()));
  double lo = INFINITY, hi = 0.0;
  for (auto& [mu, p] : pairs) {
    if (!(mu > 0.0) || !(p > 0.0)) throw Error(ErrorKind::fit, "exponent fit needs positive values");
    lo = std::min(lo, mu);
    hi = std::max(hi, mu);
  }
  if (hi < 10.0 * lo) throw Error(ErrorKind::fit, "eigenvalues span less than a factor 10", hi / lo);
  const double n = static_cast<double>(pairs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [mu, p] : pairs) {
    const double x = std::log(mu), y = std::log(p);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  ExponentFit f;
  f.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double b = (sy - f.exponent * sx) / n;
  f.constant = std::exp(b);
  double ss = 0;
  for (auto& [mu, p] : pairs) {
    const double e = std::log(p) - (b + f.exponent * std::log(mu));
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  f.bound_exponent = bound_exponent;
  for (auto& [mu, p] : pairs) f.bound_constant = std::max(f.bound_constant, p / std::pow(mu, bound_exponent));
  return f;
}

// ---------------------------------------------------------------------------
// Output.

inline void write_period_csv(const PeriodTable& t, std::ostream& os) {
  os << "label,curve,n,p_re,p_im,p_hat_re,p_hat_im,abs2_p_hat,a_re,a_im,abs2_a,flag\n";
  os << std::setprecision(17);
  for (auto& [n, e] : t.entries) {
    os << '"' << t.label << "\",\"" << t.curve_id << "\"," << n << ',' << e.p.real() << ',' << e.p.imag()
       << ',' << e.p_hat.real() << ',' << e.p_hat.imag() << ',' << std::norm(e.p_hat) << ',';
    if (e.a) {
      const cplx a = e.a->value();
      os << a.real() << ',' << a.imag() << ',' << e.a->abs2();
    } else {
      os << ",,";
    }
    os << ',' << e.flag << '\n';
  }
}

inline nlohmann::json to_json(const AverageBoundReport& r) {
  return {{"T_grid", r.T_grid},
          {"forms", r.labels},
          {"mu", r.mu},
          {"ratios", r.ratio},
          {"constant", r.constant},
          {"growth_T", r.growth_T},
          {"growth_forms", r.growth_forms},
          {"variation_T", r.variation_T},
          {"variation_forms", r.variation_forms},
          {"allowed_growth", r.allowed_growth},
          {"monotone", r.monotone},
          {"growth_check_pass", r.pass}};
}

inline nlohmann::json to_json(const ExponentFit& f) {
  return {{"exponent", f.exponent},
          {"constant", f.constant},
          {"residual", f.residual},
          {"bound_exponent", f.bound_exponent},
          {"bound_constant", f.bound_constant}};
}

}  // namespace hypres
