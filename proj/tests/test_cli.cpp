#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "hypres/config.hpp"
#include "hypres/sweep.hpp"

namespace fs = std::filesystem;
using namespace hypres;

namespace {

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("hypres_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the built CLI with stdout/stderr discarded; returns the exit status.
int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" HYPRES_CLI "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

ErrorKind parse_kind(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::input;  // anything but parse
}

}  // namespace

TEST(Config, SerializeParseIsIdempotent) {
  RunConfig c;
  c.recipe = "density-regime";
  c.curves.push_back(CurveSpec{CurveKind::geodesic, {3.0, 2.0, 1.0, 1.0}, 0.25});
  c.tolerances["plancherel.rel"] = 1e-9;
  c.jobs = 3;
  const std::string a = serialize(c);
  const std::string b = serialize(parse_config(a));
  EXPECT_EQ(a, b);
  EXPECT_EQ(serialize(RunConfig{}), serialize(parse_config(serialize(RunConfig{}))));
  // comments are allowed in hand-written files
  EXPECT_EQ(parse_config("{ // only the recipe\n \"recipe\": \"sphere-sharpness\" }").recipe, "sphere-sharpness");
}

TEST(Config, RejectsBadInput) {
  EXPECT_EQ(parse_kind("{\"recipie\": \"average-bound\"}"), ErrorKind::parse);
  EXPECT_EQ(parse_kind("{\"recipe\": \"nonsense\"}"), ErrorKind::parse);
  EXPECT_EQ(parse_kind("{\"brackets\": [{\"lo\": 10, \"hi\": 9}]}"), ErrorKind::parse);
  EXPECT_EQ(parse_kind("{\"tolerances\": {\"no.such.key\": 1}}"), ErrorKind::parse);
  EXPECT_EQ(parse_kind("{\"tolerances\": {\"plancherel.rel\": -1}}"), ErrorKind::parse);
  EXPECT_EQ(parse_kind("{\"jobs\": 0}"), ErrorKind::parse);
  EXPECT_EQ(parse_kind("{\"modes\": [1.5, 3]}"), ErrorKind::parse);
  EXPECT_EQ(parse_kind("{\"T_grid\": \"8,16\"}"), ErrorKind::parse);
  EXPECT_EQ(parse_kind("{ not json"), ErrorKind::parse);
  EXPECT_EQ(parse_kind("{\"curves\": [{\"kind\": \"circle\", \"center\": [0, 1], \"radius\": 1, \"x\": 0}]}"),
            ErrorKind::parse);
}

TEST(Sweep, SphereSharpnessSlopeAndDeterminism) {
  RunConfig c;
  c.recipe = "sphere-sharpness";
  c.surface = Surface::sphere;
  const auto a = run_sweep(c);
  EXPECT_TRUE(a.plancherel_ok);
  EXPECT_NEAR(a.summary.at("fit").at("exponent").get<double>(), 0.25, 0.02);
  c.jobs = 2;
  const auto b = run_sweep(c);
  EXPECT_EQ(a.files, b.files);
  // the sweep needs the sphere
  c.surface = Surface::modular;
  EXPECT_THROW(run_sweep(c), Error);
}

TEST(Sweep, ParallelForRethrowsLowestIndex) {
  try {
    parallel_for(8, 3, [](std::size_t i) {
      if (i == 2 || i == 6) throw Error(ErrorKind::input, "boom " + std::to_string(i));
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("boom 2"), std::string::npos);
  }
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("exit");
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("sweep --config " + (dir / "absent.json").string()), 2);
  std::ofstream(dir / "bad.json") << "{\"recipe\": \"average-bound\", \"extra\": 1}";
  EXPECT_EQ(run("sweep --config " + (dir / "bad.json").string()), 2);
  // average-bound without cached forms is a configuration problem
  const std::string empty_cache = (dir / "cache").string();
  EXPECT_EQ(run("sweep --cache " + empty_cache + " --out " + (dir / "out").string()), 2);
  EXPECT_EQ(run("verify --only 42 --out " + (dir / "out").string()), 2);
  // nothing to solve is fine
  std::ofstream(dir / "none.json") << "{\"brackets\": []}";
  EXPECT_EQ(run("solve --config " + (dir / "none.json").string() + " --out " + (dir / "out").string()), 0);
  fs::remove_all(dir);
}

TEST(Cli, SweepWritesDeterministicFiles) {
  const auto dir = scratch("sweep");
  std::ofstream(dir / "sphere.json") << "{\"recipe\": \"sphere-sharpness\", \"surface\": \"sphere\", \"modes\": [10, 60]}";
  const std::string cfg = "sweep --config " + (dir / "sphere.json").string();
  ASSERT_EQ(run(cfg + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run(cfg + " --out " + (dir / "b").string() + " --jobs 2"), 0);
  for (const char* f : {"sphere_sharpness.csv", "sphere_sharpness.json"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  fs::remove_all(dir);
}

TEST(Cli, CacheFlagOverridesEnvironment) {
  // the flag wins: an existing cache from the environment is ignored
  const auto dir = scratch("env");
  const std::string out = " --out " + (dir / "out").string();
  EXPECT_EQ(run("sweep --cache " + (dir / "nothing").string() + out, "HYPRES_CACHE_DIR=" + (dir / "other").string()),
            2);
  fs::remove_all(dir);
}
