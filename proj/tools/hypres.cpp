// hypres: batch driver.
//   hypres solve  [--config F] [--cache D] [--out D] [--jobs N]
//   hypres sweep  [--config F] [--cache D] [--out D] [--jobs N]
//   hypres verify [--config F] [--cache D] [--out D] [--only 8,9] [--solve-missing] [--no-budgets]
// Exit status: 0 ok, 1 verification or solver failure, 2 usage/config error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hypres/config.hpp"
#include "hypres/sweep.hpp"
#include "hypres/verify.hpp"

namespace fs = std::filesystem;
using namespace hypres;

namespace {

constexpr int kOk = 0, kFailed = 1, kUsage = 2;

struct Common {
  std::string config, out, cache;
  int jobs = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "run configuration (JSON)")->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory");
  app->add_option("--cache", c.cache, "form cache directory");
  app->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

// Config file, then the environment, then flags.
RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (const char* env = std::getenv("HYPRES_CACHE_DIR"); env && *env) cfg.cache_dir = env;
  if (!c.cache.empty()) cfg.cache_dir = c.cache;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.jobs > 0) cfg.jobs = c.jobs;
  cfg.validate();
  return cfg;
}

int cmd_solve(const RunConfig& cfg) {
  if (cfg.brackets.empty()) {
    std::cerr << "warning: no eigenvalue brackets configured; nothing to solve\n";
    return kOk;
  }
  const fs::path cache(cfg.cache_dir);
  struct Row {
    std::optional<MaassForm> form;
    bool cached = false;
    std::string error;
  };
  std::vector<Row> rows(cfg.brackets.size());
  parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
    const auto& b = cfg.brackets[i];
    const fs::path file = cache / cache_file_name(b.lo, b.hi, b.parity);
    try {
      if (auto f = load_maass(file)) {
        rows[i].form = *f;
        rows[i].cached = true;
        return;
      }
      rows[i].form = hejhal_solve(b.lo, b.hi, b.parity);
      save_maass(*rows[i].form, file);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  });
  nlohmann::json summary = nlohmann::json::array();
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& b = cfg.brackets[i];
    std::ostringstream line;
    line << "[" << b.lo << ", " << b.hi << "] " << to_string(b.parity) << ": ";
    nlohmann::json j = {{"lo", b.lo}, {"hi", b.hi}, {"parity", to_string(b.parity)}};
    if (!rows[i].error.empty()) {
      ok = false;
      line << "ERROR " << rows[i].error;
      j["error"] = rows[i].error;
    } else {
      const auto& f = *rows[i].form;
      line << std::setprecision(12) << "R = " << f.R << std::scientific << std::setprecision(2)
                << ", residual " << f.residual << ", truncation shift " << f.truncation_shift << std::defaultfloat
                << ", M0 " << f.M0 << (rows[i].cached ? " (cached)" : " (solved)");
      j.update({{"R", f.R},
                {"residual", f.residual},
                {"truncation_shift", f.truncation_shift},
                {"M0", f.M0},
                {"cached", rows[i].cached},
                {"file", cache_file_name(b.lo, b.hi, b.parity)}});
    }
    std::cout << line.str() << "\n";
    summary.push_back(j);
  }
  write_file_atomic(fs::path(cfg.output_dir) / "solve_summary.json", summary.dump(2) + "\n");
  return ok ? kOk : kFailed;
}

int cmd_sweep(const RunConfig& cfg) {
  const SweepOutput out = run_sweep(cfg);
  for (auto& [name, content] : out.files) {
    write_file_atomic(fs::path(cfg.output_dir) / name, content);
    std::cout << "wrote " << (fs::path(cfg.output_dir) / name).string() << "\n";
  }
  if (!out.plancherel_ok) {
    std::cerr << "Plancherel identity violated beyond plancherel.rel; see the summary JSON\n";
    return kFailed;
  }
  return kOk;
}

int cmd_verify(const RunConfig& cfg, const std::vector<int>& only, bool solve_missing, bool budgets) {
  VerifyOptions o;
  o.tolerances = cfg.effective_tolerances();
  o.cache_dir = fs::path(cfg.cache_dir);
  o.solve_missing = solve_missing;
  o.enforce_budgets = budgets;
  if (!cfg.brackets.empty()) o.forms = cfg.brackets;
  for (int id : only) {
    if (!criteria().count(id)) throw Error(ErrorKind::parse, "no acceptance criterion " + std::to_string(id));
    o.only.insert(id);
  }
  const auto results = run_acceptance(o, [](const CheckResult& r) { std::cout << format_result(r) << std::endl; });
  nlohmann::json rep = nlohmann::json::array();
  int passed = 0;
  for (auto& r : results) {
    passed += r.status == CheckStatus::pass;
    rep.push_back({{"id", r.id},
                   {"name", r.name},
                   {"status", to_string(r.status)},
                   {"detail", r.detail},
                   {"seconds", r.seconds},
                   {"budget_seconds", r.budget},
                   {"metrics", r.metrics}});
  }
  write_file_atomic(fs::path(cfg.output_dir) / "verify_report.json", rep.dump(2) + "\n");
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  for (auto& r : results)
    if (r.status != CheckStatus::pass)
      std::cout << "  " << to_string(r.status) << ": " << r.id << ". " << r.name << "\n";
  return passed == static_cast<int>(results.size()) ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Restriction periods of Laplace eigenfunctions: solve, sweep, verify"};
  app.require_subcommand(1);
  Common solve_opts, sweep_opts, verify_opts;
  auto* solve = app.add_subcommand("solve", "compute Maass forms for the configured brackets and cache them");
  add_common(solve, solve_opts);
  auto* sweep = app.add_subcommand("sweep", "run the configured recipe and write CSV/JSON tables");
  add_common(sweep, sweep_opts);
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  add_common(verify, verify_opts);
  std::vector<int> only;
  bool solve_missing = false, no_budgets = false;
  verify->add_option("--only", only, "criterion ids to run")->delimiter(',');
  verify->add_flag("--solve-missing", solve_missing, "solve forms absent from the cache");
  verify->add_flag("--no-budgets", no_budgets, "do not fail checks that exceed their time budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(resolve(solve_opts));
    if (*sweep) return cmd_sweep(resolve(sweep_opts));
    if (*verify) return cmd_verify(resolve(verify_opts), only, solve_missing, !no_budgets);
  } catch (const Error& e) {
    std::cerr << "hypres: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::parse:
      case ErrorKind::input:
      case ErrorKind::missing_cache:
        return kUsage;
      default:
        return kFailed;
    }
  } catch (const std::exception& e) {
    std::cerr << "hypres: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
