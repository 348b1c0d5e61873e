#pragma once

// Sweep recipes for the batch driver. Each returns the files to write (name
// -> content) plus a JSON summary; nothing here touches the filesystem except
// reading cached forms, so reruns with the same inputs give the same bytes.

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hypres/config.hpp"
#include "hypres/periods.hpp"
#include "hypres/verify.hpp"
#include "json.hpp"

namespace hypres {

struct SweepOutput {
  std::map<std::string, std::string> files;
  nlohmann::json summary = nlohmann::json::object();
  bool plancherel_ok = true;
};

// Runs fn(0..n-1) on up to `jobs` threads. Results must go to per-index slots;
// the first failure by index is rethrown.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> err(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  const std::size_t nt = std::min<std::size_t>(std::max(jobs, 1), n);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
}

namespace detail {

inline std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline DensityTable curve_density(const Curve& c, const SpectralParam& p, long lo, long hi) {
  if (c.geodesic) return density_b(p, c.geodesic->q, lo, hi);
  if (c.circle) return density_c(p, c.circle->g, lo, hi);
  throw Error(ErrorKind::input, "curve " + c.id + " has no model density");
}

}  // namespace detail

inline SweepOutput sweep_average_bound(const RunConfig& cfg) {
  if (cfg.surface != Surface::modular) throw Error(ErrorKind::input, "average-bound recipe runs on the modular surface");
  if (cfg.brackets.empty()) throw Error(ErrorKind::input, "average-bound recipe needs eigenvalue brackets");
  for (double T : cfg.T_grid)
    if (T > std::min(-cfg.n_lo, cfg.n_hi)) throw Error(ErrorKind::input, "T grid exceeds the n range");
  const auto tol = cfg.effective_tolerances();
  std::vector<std::shared_ptr<const MaassForm>> forms;
  for (auto& b : cfg.brackets) forms.push_back(obtain_form(b, std::filesystem::path(cfg.cache_dir), false));
  std::vector<Curve> curves;
  for (auto& c : cfg.curves) curves.push_back(c.build());

  // tables[curve][form]
  std::vector<std::vector<PeriodTable>> tables(curves.size(), std::vector<PeriodTable>(forms.size()));
  parallel_for(curves.size() * forms.size(), cfg.jobs, [&](std::size_t k) {
    const std::size_t ci = k / forms.size(), fi = k % forms.size();
    const auto phi = modular_eigenfunction(forms[fi]);
    const auto p = SpectralParam::from_R(forms[fi]->R);
    tables[ci][fi] = extract_coefficients(periods(restrict(phi, curves[ci]), cfg.n_lo, cfg.n_hi),
                                          detail::curve_density(curves[ci], p, cfg.n_lo, cfg.n_hi));
  });

  SweepOutput out;
  std::ostringstream ratios;
  ratios << "curve,form,R,mu,T,partial_sum,ratio\n" << std::setprecision(17);
  nlohmann::json per_curve = nlohmann::json::array();
  double worst_plancherel = 0.0;
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const bool geo = curves[ci].kind == CurveKind::geodesic;
    const double bound_exp = geo ? 0.25 : 1.0 / 6.0;
    double C = 0.0, C0 = 0.0;
    for (std::size_t fi = 0; fi < forms.size(); ++fi) {
      const auto& t = tables[ci][fi];
      worst_plancherel = std::max(worst_plancherel, t.plancherel_error());
      C = std::max(C, t.restriction_norm2() / std::pow(t.mu, bound_exp));
      if (auto e = t.find(0)) C0 = std::max(C0, std::abs(e->p));
      std::ostringstream csv;
      write_period_csv(t, csv);
      out.files["periods_curve" + std::to_string(ci) + "_R" + detail::fixed(forms[fi]->R, 6) + ".csv"] = csv.str();
      for (double T : cfg.T_grid) {
        const double s = t.partial_sum(T);
        ratios << '"' << t.curve_id << "\",\"" << t.label << "\"," << forms[fi]->R << ',' << t.mu << ',' << T << ','
               << s << ',' << s / std::max(T, std::sqrt(t.mu)) << '\n';
      }
    }
    nlohmann::json cj = {{"curve", curves[ci].id},
                         {"kind", to_string(curves[ci].kind)},
                         {"bound_exponent", bound_exp},
                         {"fitted_constant", C},
                         {"period0_constant", C0}};
    if (forms.size() >= 2 && cfg.T_grid.size() >= 3) {
      std::vector<PeriodTable> ts(tables[ci].begin(), tables[ci].end());
      const auto rep = check_average_bound(ts, cfg.T_grid, tol.at("average.variation"));
      cj["ratios"] = to_json(rep);
    } else {
      cj["ratios"] = "needs at least 2 forms and 3 values of T";
    }
    per_curve.push_back(cj);
  }
  out.files["average_bound.csv"] = ratios.str();
  nlohmann::json fj = nlohmann::json::array();
  for (auto& f : forms) fj.push_back({{"R", f->R}, {"parity", to_string(f->parity)}, {"mu", f->mu()}});
  out.plancherel_ok = worst_plancherel <= tol.at("plancherel.rel");
  out.summary = {{"recipe", cfg.recipe},         {"surface", "modular"},
                 {"forms", fj},                  {"T_grid", cfg.T_grid},
                 {"curves", per_curve},          {"plancherel_worst_rel", worst_plancherel},
                 {"plancherel_ok", out.plancherel_ok}};
  out.files["average_bound.json"] = out.summary.dump(2) + "\n";
  return out;
}

inline SweepOutput sweep_sphere_sharpness(const RunConfig& cfg) {
  if (cfg.surface != Surface::sphere) throw Error(ErrorKind::input, "sphere-sharpness recipe runs on the sphere");
  const auto tol = cfg.effective_tolerances();
  const std::size_t count = static_cast<std::size_t>(cfg.mode_hi - cfg.mode_lo + 1);
  std::vector<double> p(count), err(count);
  parallel_for(count, cfg.jobs, [&](std::size_t i) {
    const long n = cfg.mode_lo + static_cast<long>(i);
    const auto t = periods(restrict(sphere_harmonic(static_cast<int>(n), static_cast<int>(n)), sphere_equator()), 0, 0);
    p[i] = t.restriction_norm2();
    err[i] = t.plancherel_error();
  });
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < count; ++i) {
    const double n = static_cast<double>(cfg.mode_lo + static_cast<long>(i));
    pairs.emplace_back(n * (n + 1.0), p[i]);
  }
  const auto fit = fit_restriction_exponent(pairs, 0.25);
  SweepOutput out;
  std::ostringstream csv;
  csv << "n,mu,p_equator,plancherel_rel_err,local_slope,fitted_slope\n" << std::setprecision(17);
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == count ? i : i + 1;
    const double local = std::log(pairs[b].second / pairs[a].second) / std::log(pairs[b].first / pairs[a].first);
    worst = std::max(worst, err[i]);
    csv << cfg.mode_lo + static_cast<long>(i) << ',' << pairs[i].first << ',' << p[i] << ',' << err[i] << ','
        << local << ',' << fit.exponent << '\n';
  }
  out.files["sphere_sharpness.csv"] = csv.str();
  out.plancherel_ok = worst <= tol.at("plancherel.rel");
  out.summary = {{"recipe", cfg.recipe},
                 {"surface", "sphere"},
                 {"curve", "equator"},
                 {"modes", {cfg.mode_lo, cfg.mode_hi}},
                 {"fit", to_json(fit)},
                 {"target_exponent", 0.25},
                 {"slope_tol", tol.at("sphere.slope_tol")},
                 {"within_tol", std::abs(fit.exponent - 0.25) <= tol.at("sphere.slope_tol")},
                 {"plancherel_worst_rel", worst},
                 {"plancherel_ok", out.plancherel_ok}};
  out.files["sphere_sharpness.json"] = out.summary.dump(2) + "\n";
  return out;
}

// Envelope shapes: geodesic bulk/edge/tail 1/|l|, 1/|l|^(1/2), e^{-0.1 omega};
// circles use 1/|l|^(2/3) at the edge. Constants are fitted per regime at
// the first lambda of the list and reused for the rest.
inline SweepOutput sweep_density_regime(const RunConfig& cfg) {
  if (cfg.lambda_im.empty()) throw Error(ErrorKind::input, "density-regime recipe needs lambda_im values");
  const auto tol = cfg.effective_tolerances();
  const double slack = tol.at("envelope.slack");
  std::vector<Curve> curves;
  for (auto& c : cfg.curves) curves.push_back(c.build());
  std::vector<std::vector<DensityTable>> tab(curves.size(), std::vector<DensityTable>(cfg.lambda_im.size()));
  parallel_for(curves.size() * cfg.lambda_im.size(), cfg.jobs, [&](std::size_t k) {
    const std::size_t ci = k / cfg.lambda_im.size(), li = k % cfg.lambda_im.size();
    tab[ci][li] = detail::curve_density(curves[ci], SpectralParam::from_lambda(cplx(0.0, cfg.lambda_im[li])),
                                        cfg.n_lo, cfg.n_hi);
  });
  SweepOutput out;
  std::ostringstream csv;
  csv << "curve,lambda_im,n,omega,edge,re,im,abs2,log10_abs2,regime,log_envelope_excess,within_envelope\n"
      << std::setprecision(17);
  nlohmann::json per_curve = nlohmann::json::array();
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const bool geo = curves[ci].kind == CurveKind::geodesic;
    auto omega = [&](const DensityTable& d, long n) {
      return geo ? std::abs(d.s(n).imag()) : 2.0 * std::numbers::pi * std::abs(static_cast<double>(n));
    };
    auto env = [&](Regime g, double tau, double w) {
      if (!geo && g == Regime::edge) return -2.0 / 3.0 * std::log(tau);
      return checks::envelope_log(g, tau, w);
    };
    std::map<Regime, double> c;
    for (auto& [n, e] : tab[ci][0].entries) {
      if (e.value.is_zero()) continue;
      const double v = 2.0 * e.value.log_abs() - env(e.regime, cfg.lambda_im[0], omega(tab[ci][0], n));
      c[e.regime] = c.count(e.regime) ? std::max(c[e.regime], v) : v;
    }
    nlohmann::json counts = nlohmann::json::object();
    double worst = 0.0;
    for (std::size_t li = 0; li < cfg.lambda_im.size(); ++li) {
      const auto& d = tab[ci][li];
      const double tau = cfg.lambda_im[li];
      const double edge = geo ? tau : d.edge_constant * tau;
      std::map<std::string, int> by_regime;
      for (auto& [n, e] : d.entries) {
        const cplx v = e.value.value();
        const double w = omega(d, n);
        ++by_regime[to_string(e.regime)];
        csv << '"' << curves[ci].id << "\"," << tau << ',' << n << ',' << w << ',' << edge << ',' << v.real() << ','
            << v.imag() << ',' << std::norm(v) << ',' << e.value.log10_abs2() << ',' << to_string(e.regime) << ',';
        if (c.count(e.regime) && !e.value.is_zero()) {
          const double x = 2.0 * e.value.log_abs() - env(e.regime, tau, w) - c[e.regime];
          worst = std::max(worst, x);
          csv << x << ',' << (x <= std::log(slack) ? 1 : 0) << '\n';
        } else {
          csv << ",\n";
        }
      }
      counts[detail::fixed(tau, 3)] = by_regime;
    }
    nlohmann::json cj = {{"curve", curves[ci].id}, {"fit_lambda_im", cfg.lambda_im[0]}, {"regime_counts", counts},
                         {"max_ratio_to_envelope", std::exp(worst)}, {"slack", slack}};
    for (auto& [g, v] : c) cj["log_constant"][to_string(g)] = v;
    per_curve.push_back(cj);
  }
  out.files["density_regime.csv"] = csv.str();
  out.summary = {{"recipe", cfg.recipe}, {"n_range", {cfg.n_lo, cfg.n_hi}}, {"lambda_im", cfg.lambda_im},
                 {"curves", per_curve}};
  out.files["density_regime.json"] = out.summary.dump(2) + "\n";
  return out;
}

inline SweepOutput run_sweep(const RunConfig& cfg) {
  if (cfg.recipe == "average-bound") return sweep_average_bound(cfg);
  if (cfg.recipe == "sphere-sharpness") return sweep_sphere_sharpness(cfg);
  if (cfg.recipe == "density-regime") return sweep_density_regime(cfg);
  throw Error(ErrorKind::input, "unknown recipe " + cfg.recipe);
}

}  // namespace hypres
