// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Usage: acceptance [criterion ids...]; forms are cached under
// $HYPRES_CACHE_DIR (default ./hypres-cache).

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "hypres/verify.hpp"

int main(int argc, char** argv) {
  hypres::VerifyOptions o;
  o.cache_dir = hypres::default_cache_dir();
  for (int i = 1; i < argc; ++i) o.only.insert(std::atoi(argv[i]));
  const auto results = hypres::run_acceptance(o, [](const hypres::CheckResult& r) {
    std::cout << hypres::format_result(r) << std::endl;
  });
  int failed = 0;
  for (auto& r : results) failed += r.status != hypres::CheckStatus::pass;
  std::cout << (failed ? "ACCEPTANCE FAILED: " : "ACCEPTANCE PASSED: ") << results.size() - failed << "/"
            << results.size() << " criteria" << std::endl;
  return failed ? 1 : 0;
}
