#pragma once

// Run configuration for the batch driver. Stored as JSON; parsing is strict
// (unknown keys and wrong types are rejected) and serialization is canonical
// so a parse/serialize cycle reproduces the text.

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hypres/eigen.hpp"
#include "hypres/error.hpp"
#include "hypres/verify.hpp"
#include "json.hpp"

namespace hypres {

struct CurveSpec {
  CurveKind kind = CurveKind::geodesic;
  std::array<double, 4> matrix{2.0, 1.0, 1.0, 1.0};  // geodesic
  double theta0 = 0.0;
  double center_x = 0.0, center_y = 1.2, radius = 1.0;  // circle

  Curve build() const {
    if (kind == CurveKind::geodesic)
      return geodesic_curve(GroupElement(matrix[0], matrix[1], matrix[2], matrix[3]), theta0);
    if (kind == CurveKind::circle) return circle_curve(cplx(center_x, center_y), radius);
    throw Error(ErrorKind::input, std::string("curve kind ") + to_string(kind) + " is not configurable");
  }
};

inline const std::vector<std::string>& sweep_recipes() {
  static const std::vector<std::string> r = {"average-bound", "sphere-sharpness", "density-regime"};
  return r;
}

struct RunConfig {
  std::string recipe = "average-bound";
  Surface surface = Surface::modular;
  std::vector<FormSpec> brackets = default_forms();
  long mode_lo = 10, mode_hi = 200;  // sphere degrees for the sharpness recipe
  std::vector<CurveSpec> curves = {CurveSpec{}, CurveSpec{CurveKind::circle}};
  std::vector<double> T_grid = {8, 16, 32, 64};
  long n_lo = -64, n_hi = 64;
  std::vector<double> lambda_im = {80, 160};  // density-regime: Im lambda, first one fits the constants
  std::string output_dir = "hypres-out";
  std::string cache_dir = default_cache_dir().string();
  std::map<std::string, double> tolerances;  // overrides of default_tolerances()
  int jobs = 1;

  std::map<std::string, double> effective_tolerances() const {
    auto t = default_tolerances();
    for (auto& [k, v] : tolerances) t[k] = v;
    return t;
  }

  void validate() const {
    auto bad = [](const std::string& m) { throw Error(ErrorKind::parse, m); };
    if (std::find(sweep_recipes().begin(), sweep_recipes().end(), recipe) == sweep_recipes().end())
      bad("unknown recipe " + recipe);
    for (auto& b : brackets)
      if (!(b.lo < b.hi) || !(b.lo > 0.0)) bad("bracket needs 0 < lo < hi");
    if (mode_lo < 0 || mode_lo > mode_hi) bad("mode range needs 0 <= lo <= hi");
    if (n_lo > n_hi) bad("n range needs lo <= hi");
    for (double T : T_grid)
      if (!(T > 0.0)) bad("T values must be positive");
    for (double l : lambda_im)
      if (!(l > 0.0)) bad("lambda_im values must be positive");
    for (auto& c : curves)
      if (c.kind != CurveKind::geodesic && c.kind != CurveKind::circle) bad("curves are geodesic or circle");
    const auto defaults = default_tolerances();
    for (auto& [k, v] : tolerances) {
      if (!defaults.count(k)) bad("unknown tolerance " + k);
      if (!(v > 0.0) || !std::isfinite(v)) bad("tolerance " + k + " must be positive");
    }
    if (jobs < 1) bad("jobs must be at least 1");
  }
};

inline Surface parse_surface(const std::string& s) {
  if (s == "sphere") return Surface::sphere;
  if (s == "torus") return Surface::torus;
  if (s == "modular") return Surface::modular;
  throw Error(ErrorKind::parse, "unknown surface " + s);
}

inline nlohmann::json to_json(const CurveSpec& c) {
  if (c.kind == CurveKind::circle)
    return {{"kind", "circle"}, {"center", {c.center_x, c.center_y}}, {"radius", c.radius}};
  return {{"kind", "geodesic"}, {"matrix", c.matrix}, {"theta0", c.theta0}};
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json br = nlohmann::json::array();
  for (auto& b : c.brackets) br.push_back({{"lo", b.lo}, {"hi", b.hi}, {"parity", to_string(b.parity)}});
  nlohmann::json cv = nlohmann::json::array();
  for (auto& x : c.curves) cv.push_back(to_json(x));
  return {{"recipe", c.recipe},
          {"surface", to_string(c.surface)},
          {"brackets", br},
          {"modes", {c.mode_lo, c.mode_hi}},
          {"curves", cv},
          {"T_grid", c.T_grid},
          {"n_range", {c.n_lo, c.n_hi}},
          {"lambda_im", c.lambda_im},
          {"output_dir", c.output_dir},
          {"cache_dir", c.cache_dir},
          {"tolerances", c.tolerances},
          {"jobs", c.jobs}};
}

inline std::string serialize(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

namespace detail {

inline void only_keys(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::parse, where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw Error(ErrorKind::parse, "unknown key " + it.key() + " in " + where);
  }
}

inline std::pair<double, double> pair_of(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::parse, what + " must be a two-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline long whole(double v, const std::string& what) {
  if (v != std::floor(v) || std::abs(v) > 1e15) throw Error(ErrorKind::parse, what + " must be integers");
  return static_cast<long>(v);
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    detail::only_keys(j,
                      {"recipe", "surface", "brackets", "modes", "curves", "T_grid", "n_range", "lambda_im",
                       "output_dir", "cache_dir", "tolerances", "jobs"},
                      "config");
    if (j.contains("recipe")) c.recipe = j.at("recipe").get<std::string>();
    if (j.contains("surface")) c.surface = parse_surface(j.at("surface").get<std::string>());
    if (j.contains("brackets")) {
      c.brackets.clear();
      for (auto& b : j.at("brackets")) {
        detail::only_keys(b, {"lo", "hi", "parity"}, "bracket");
        FormSpec f;
        f.lo = b.at("lo").get<double>();
        f.hi = b.at("hi").get<double>();
        f.parity = b.contains("parity") ? parse_parity(b.at("parity").get<std::string>()) : Parity::even;
        c.brackets.push_back(f);
      }
    }
    if (j.contains("modes")) {
      auto [lo, hi] = detail::pair_of(j.at("modes"), "modes");
      c.mode_lo = detail::whole(lo, "modes");
      c.mode_hi = detail::whole(hi, "modes");
    }
    if (j.contains("curves")) {
      c.curves.clear();
      for (auto& x : j.at("curves")) {
        CurveSpec s;
        const std::string kind = x.at("kind").get<std::string>();
        if (kind == "geodesic") {
          detail::only_keys(x, {"kind", "matrix", "theta0"}, "geodesic curve");
          const auto m = x.at("matrix").get<std::vector<double>>();
          if (m.size() != 4) throw Error(ErrorKind::parse, "geodesic matrix needs 4 entries");
          std::copy(m.begin(), m.end(), s.matrix.begin());
          if (x.contains("theta0")) s.theta0 = x.at("theta0").get<double>();
        } else if (kind == "circle") {
          detail::only_keys(x, {"kind", "center", "radius"}, "circle curve");
          s.kind = CurveKind::circle;
          std::tie(s.center_x, s.center_y) = detail::pair_of(x.at("center"), "circle center");
          s.radius = x.at("radius").get<double>();
        } else {
          throw Error(ErrorKind::parse, "unknown curve kind " + kind);
        }
        c.curves.push_back(s);
      }
    }
    if (j.contains("T_grid")) c.T_grid = j.at("T_grid").get<std::vector<double>>();
    if (j.contains("n_range")) {
      auto [lo, hi] = detail::pair_of(j.at("n_range"), "n_range");
      c.n_lo = detail::whole(lo, "n_range");
      c.n_hi = detail::whole(hi, "n_range");
    }
    if (j.contains("lambda_im")) c.lambda_im = j.at("lambda_im").get<std::vector<double>>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("cache_dir")) c.cache_dir = j.at("cache_dir").get<std::string>();
    if (j.contains("tolerances")) c.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
    if (j.contains("jobs")) c.jobs = static_cast<int>(detail::whole(j.at("jobs").get<double>(), "jobs"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

inline RunConfig load_config(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorKind::parse, "cannot read config " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace hypres
