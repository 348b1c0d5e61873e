#pragma once

// Quadrature engines: adaptive Gauss-Kronrod with algebraic endpoint
// singularities and infinite ranges, the periodic trapezoid rule, fixed
// Gauss-Legendre panels for long oscillatory ranges, and a phase analyzer
// that locates and classifies stationary points.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "hypres/error.hpp"

namespace hypres {

using cplx = std::complex<double>;
using Integrand = std::function<cplx(double)>;
using RealFunction = std::function<double(double)>;

struct QuadratureResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, QuadratureResult best)
      : Error(ErrorKind::convergence_failure, what, std::abs(best.value)), best_(best) {}
  const QuadratureResult& best() const noexcept { return best_; }

 private:
  QuadratureResult best_;
};

// ---------------------------------------------------------------------------
// Gauss-Legendre rules on [-1,1], computed once per order.

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule make_gauss_legendre(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        double q0 = 1.0, q1 = x;
        for (int k = 2; k <= n; ++k) {
          const double q2 = ((2.0 * k - 1.0) * x * q1 - (k - 1.0) * q0) / k;
          q0 = q1;
          q1 = q2;
        }
        dp = n * (x * q1 - q0) / (x * x - 1.0);
        break;
      }
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

inline const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

// Sum of fixed Gauss-Legendre panels over [a,b]. No error control; callers
// size the panels from a frequency bound.
template <class F>
cplx gauss_panels(const F& f, double a, double b, std::size_t panels, int order = 32) {
  const GaussRule& g = gauss_legendre(order);
  const double h = (b - a) / static_cast<double>(panels);
  cplx sum = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    cplx s = 0.0;
    for (int k = 0; k < order; ++k) s += g.weights[k] * f(mid + 0.5 * h * g.nodes[k]);
    sum += 0.5 * h * s;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod 7-15.

struct Singularity {
  double point = 0.0;
  double exponent = 0.0;  // alpha > -1
};

struct AdaptiveOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_evaluations = 2'000'000;
  std::optional<Singularity> singularity;
  std::vector<double> breakpoints;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// A piece maps w in [0,1] to x with Jacobian dx/dw.
struct Piece {
  enum Kind { linear, sing_left, sing_right, inf_right, inf_left } kind = linear;
  double l = 0.0, r = 1.0;
  double k = 1.0;  // power for singular maps

  void map(double w, double& x, double& jac) const {
    switch (kind) {
      case linear:
        x = l + (r - l) * w;
        jac = r - l;
        return;
      case sing_left: {
        const double wk = std::pow(w, k);
        x = l + (r - l) * wk;
        jac = (r - l) * k * wk / w;
        return;
      }
      case sing_right: {
        const double wk = std::pow(w, k);
        x = r - (r - l) * wk;
        jac = (r - l) * k * wk / w;
        return;
      }
      case inf_right:
        x = l + w / (1.0 - w);
        jac = 1.0 / ((1.0 - w) * (1.0 - w));
        return;
      case inf_left:
        x = r - w / (1.0 - w);
        jac = 1.0 / ((1.0 - w) * (1.0 - w));
        return;
    }
  }
};

struct Segment {
  std::size_t piece;
  double w0, w1;
  cplx value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

inline Segment gk15(const Integrand& f, const std::vector<Piece>& pieces, std::size_t pi,
                    double w0, double w1) {
  const Piece& P = pieces[pi];
  const double c = 0.5 * (w0 + w1), h = 0.5 * (w1 - w0);
  cplx fv[15];
  auto eval = [&](double w) -> cplx {
    double x, jac;
    P.map(w, x, jac);
    if (jac == 0.0 || !std::isfinite(jac)) return 0.0;
    const cplx y = f(x);
    return y * jac;
  };
  fv[7] = eval(c);
  for (int j = 0; j < 7; ++j) {
    fv[j] = eval(c - h * kXgk[j]);
    fv[14 - j] = eval(c + h * kXgk[j]);
  }
  cplx K = kWgk[7] * fv[7];
  cplx G = kWg[3] * fv[7];
  for (int j = 0; j < 7; ++j) {
    K += kWgk[j] * (fv[j] + fv[14 - j]);
    if (j % 2 == 1) G += kWg[j / 2] * (fv[j] + fv[14 - j]);
  }
  const cplx mean = K * 0.5;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  resasc *= h;
  K *= h;
  G *= h;
  double err = std::abs(K - G);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  return {pi, w0, w1, K, err};
}

}  // namespace detail

inline QuadratureResult integrate_adaptive(const Integrand& f, double a, double b,
                                           const AdaptiveOptions& opt = {}) {
  using detail::Piece;
  if (std::isnan(a) || std::isnan(b)) throw Error(ErrorKind::domain, "NaN integration limit");
  if (a == b) return {};
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  if (opt.singularity && !(opt.singularity->exponent > -1.0))
    throw Error(ErrorKind::domain, "singular exponent must exceed -1", opt.singularity->exponent);

  std::vector<double> cuts{a};
  for (double p : opt.breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  if (opt.singularity && opt.singularity->point > a && opt.singularity->point < b)
    cuts.push_back(opt.singularity->point);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Infinite ends get a unit-length finite buffer so a singularity near them
  // is still handled by the algebraic map.
  std::vector<Piece> pieces;
  const double sp = opt.singularity ? opt.singularity->point : std::numeric_limits<double>::quiet_NaN();
  const double k = opt.singularity ? 1.0 / (1.0 + opt.singularity->exponent) : 1.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double l = cuts[i], r = cuts[i + 1];
    if (std::isinf(l) && std::isinf(r)) {
      pieces.push_back({Piece::inf_left, 0.0, 0.0, 1.0});
      pieces.push_back({Piece::inf_right, 0.0, 0.0, 1.0});
      continue;
    }
    if (std::isinf(l)) {
      const double m = r - 1.0;
      pieces.push_back({Piece::inf_left, m, m, 1.0});
      l = m;
    }
    double rr = r;
    bool tail_right = false;
    if (std::isinf(r)) {
      rr = l + 1.0;
      tail_right = true;
    }
    if (l == sp)
      pieces.push_back({Piece::sing_left, l, rr, k});
    else if (rr == sp)
      pieces.push_back({Piece::sing_right, l, rr, k});
    else
      pieces.push_back({Piece::linear, l, rr, 1.0});
    if (tail_right) pieces.push_back({Piece::inf_right, rr, rr, 1.0});
  }

  std::priority_queue<detail::Segment> heap;
  cplx total = 0.0;
  double err = 0.0;
  std::size_t evals = 0;
  std::vector<detail::Segment> done;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    auto s = detail::gk15(f, pieces, i, 0.0, 1.0);
    evals += 15;
    total += s.value;
    err += s.error;
    heap.push(s);
  }
  auto tol = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (err > tol()) {
    if (heap.empty()) break;
    if (evals + 30 > opt.max_evaluations) {
      QuadratureResult best{sign * total, err, evals};
      throw QuadratureError("evaluation budget exhausted", best);
    }
    auto s = heap.top();
    heap.pop();
    const double wm = 0.5 * (s.w0 + s.w1);
    if (wm <= s.w0 || wm >= s.w1 || (s.w1 - s.w0) < 1e-15) {
      done.push_back(s);  // cannot refine further
      continue;
    }
    auto l = detail::gk15(f, pieces, s.piece, s.w0, wm);
    auto r = detail::gk15(f, pieces, s.piece, wm, s.w1);
    evals += 30;
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to limit drift from the incremental updates.
  cplx fresh = 0.0;
  double ferr = 0.0;
  for (auto& s : done) {
    fresh += s.value;
    ferr += s.error;
  }
  while (!heap.empty()) {
    fresh += heap.top().value;
    ferr += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(fresh.real()) || !std::isfinite(fresh.imag()))
    throw QuadratureError("non-finite integrand value", {fresh, ferr, evals});
  if (ferr > std::max(opt.abs_tol, opt.rel_tol * std::abs(fresh)) * 1.0000001 && !done.empty())
    throw QuadratureError("subdivision limit reached at roundoff level", {sign * fresh, ferr, evals});
  return {sign * fresh, ferr, evals};
}

// ---------------------------------------------------------------------------
// Periodic trapezoid rule on [0,1) with node doubling.

struct PeriodicOptions {
  double rel_tol = 1e-13;
  double abs_tol = 1e-15;
  std::size_t min_nodes = 64;
  std::size_t max_nodes = std::size_t(1) << 22;
};

inline QuadratureResult integrate_periodic(const Integrand& f, const PeriodicOptions& opt = {}) {
  std::size_t n = 16;
  cplx sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += f(static_cast<double>(k) / n);
  cplx prev = sum / static_cast<double>(n);
  std::size_t evals = n;
  int small_in_a_row = 0;
  while (true) {
    cplx odd = 0.0;
    for (std::size_t k = 0; k < n; ++k) odd += f((2.0 * k + 1.0) / (2.0 * n));
    evals += n;
    sum += odd;
    n *= 2;
    const cplx cur = sum / static_cast<double>(n);
    const double diff = std::abs(cur - prev);
    const bool small = diff <= std::max(opt.abs_tol, opt.rel_tol * std::abs(cur));
    small_in_a_row = small ? small_in_a_row + 1 : 0;
    if (small_in_a_row >= 2 && n >= opt.min_nodes)
      return {cur, std::max(diff, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(cur)), evals};
    if (n >= opt.max_nodes)
      throw QuadratureError("periodic rule did not converge", {cur, diff, evals});
    prev = cur;
  }
}

// ---------------------------------------------------------------------------
// Phase analysis.

enum class PhaseRegime { nondegenerate, cubic_degenerate, no_critical_point };

inline const char* to_string(PhaseRegime r) {
  switch (r) {
    case PhaseRegime::nondegenerate: return "nondegenerate";
    case PhaseRegime::cubic_degenerate: return "cubic-degenerate";
    case PhaseRegime::no_critical_point: return "no-critical-point";
  }
  return "?";
}

struct CriticalPoint {
  double location = 0.0;
  double second_derivative = 0.0;
  double third_derivative = 0.0;
  int order = 2;  // 2: nondegenerate, 3: cubic degeneration
  double amplitude = 0.0;
};

struct PhaseReport {
  std::vector<CriticalPoint> critical_points;
  PhaseRegime regime = PhaseRegime::no_critical_point;
  double min_abs_derivative = 0.0;  // over the scan grid
};

struct PhaseDomain {
  double a = 0.0;
  double b = 1.0;
  bool periodic = false;
};

struct PhaseOptions {
  std::size_t scan_points = 4096;
  double step = 1e-5;              // first-derivative difference step
  double higher_step = 1e-3;       // second/third derivative step
  double resolution = 1e-8;
  double degeneracy_threshold = 1e-6;
  std::size_t max_critical_points = 64;
  RealFunction derivative;         // optional exact phase'
};

inline PhaseReport analyze_phase(const RealFunction& phase, const RealFunction& amplitude,
                                 PhaseDomain dom, const PhaseOptions& opt = {}) {
  const double h = opt.step, H = opt.higher_step;
  auto d1 = [&](double x) {
    if (opt.derivative) return opt.derivative(x);
    return (phase(x + h) - phase(x - h)) / (2.0 * h);
  };
  auto d2 = [&](double x) { return (phase(x + H) - 2.0 * phase(x) + phase(x - H)) / (H * H); };
  auto d3 = [&](double x) {
    return (phase(x + 2 * H) - 2.0 * phase(x + H) + 2.0 * phase(x - H) - phase(x - 2 * H)) /
           (2.0 * H * H * H);
  };
  const std::size_t N = opt.scan_points;
  const double L = dom.b - dom.a;
  const std::size_t M = dom.periodic ? N : N + 1;
  std::vector<double> xs(M), ds(M);
  double maxd = 0.0, mind = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < M; ++k) {
    xs[k] = dom.a + L * static_cast<double>(k) / N;
    ds[k] = d1(xs[k]);
    maxd = std::max(maxd, std::abs(ds[k]));
    mind = std::min(mind, std::abs(ds[k]));
  }
  const double zero_tol = 1e-9 * std::max(1.0, maxd);
  std::vector<double> found;
  auto add = [&](double x) {
    if (dom.periodic) {
      x = dom.a + std::fmod(std::fmod(x - dom.a, L) + L, L);
      if (dom.b - x < opt.resolution) x = dom.a;
    }
    for (double y : found) {
      double dist = std::abs(x - y);
      if (dom.periodic) dist = std::min(dist, L - dist);
      if (dist < 1e3 * opt.resolution) return;
    }
    found.push_back(x);
    if (found.size() > opt.max_critical_points)
      throw Error(ErrorKind::resolution, "more than " + std::to_string(opt.max_critical_points) +
                                             " critical points");
  };
  const std::size_t segs = dom.periodic ? M : M - 1;
  for (std::size_t k = 0; k < M; ++k)
    if (ds[k] == 0.0) add(xs[k]);
  for (std::size_t k = 0; k < segs; ++k) {
    const std::size_t j = (k + 1) % M;
    double lo = xs[k], hi = dom.periodic && j == 0 ? dom.b : xs[j];
    double flo = ds[k], fhi = ds[j];
    if (flo == 0.0 || fhi == 0.0 || (flo > 0) == (fhi > 0)) continue;
    while (hi - lo > opt.resolution) {
      const double mid = 0.5 * (lo + hi);
      const double fm = d1(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm > 0) == (flo > 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    add(0.5 * (lo + hi));
  }
  // Double zeros of phase' do not change sign; catch them as local minima of
  // |phase'| that reach zero.
  for (std::size_t k = 0; k < M; ++k) {
    if (!dom.periodic && (k == 0 || k + 1 == M)) continue;
    const std::size_t km = (k + M - 1) % M, kp = (k + 1) % M;
    const double a0 = std::abs(ds[km]), a1 = std::abs(ds[k]), a2 = std::abs(ds[kp]);
    if (!(a1 <= a0 && a1 <= a2)) continue;
    if ((ds[km] > 0) != (ds[kp] > 0)) continue;  // handled by sign change
    double lo = xs[k] - L / N, hi = xs[k] + L / N;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = std::abs(d1(x1)), f2 = std::abs(d1(x2));
    while (hi - lo > opt.resolution) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = std::abs(d1(x1));
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = std::abs(d1(x2));
      }
    }
    const double xm = 0.5 * (lo + hi);
    if (std::abs(d1(xm)) <= zero_tol) {
      if (!dom.periodic && (xm < dom.a || xm > dom.b)) continue;
      add(xm);
    }
  }
  std::sort(found.begin(), found.end());
  PhaseReport rep;
  rep.min_abs_derivative = mind;
  for (double x : found) {
    CriticalPoint cp;
    cp.location = x;
    cp.second_derivative = d2(x);
    cp.third_derivative = d3(x);
    cp.amplitude = amplitude ? amplitude(x) : 1.0;
    if (std::abs(cp.second_derivative) < opt.degeneracy_threshold) {
      if (std::abs(cp.third_derivative) < opt.degeneracy_threshold)
        throw Error(ErrorKind::resolution, "critical point degenerate beyond cubic order", x);
      cp.order = 3;
    }
    rep.critical_points.push_back(cp);
  }
  if (rep.critical_points.empty())
    rep.regime = PhaseRegime::no_critical_point;
  else if (std::any_of(rep.critical_points.begin(), rep.critical_points.end(),
                       [](const CriticalPoint& c) { return c.order == 3; }))
    rep.regime = PhaseRegime::cubic_degenerate;
  else
    rep.regime = PhaseRegime::nondegenerate;
  return rep;
}

}  // namespace hypres
