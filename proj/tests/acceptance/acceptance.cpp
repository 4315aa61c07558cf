// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "calcap/verify.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 1;
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (a == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--seed N] [--only ID]\n", argv[0]);
      return 2;
    }
  }
  int failed = 0;
  for (int id = 1; id <= 10; ++id) {
    if (!only.empty() && std::to_string(id) != only) continue;
    const calcap::CriterionResult r = calcap::run_criterion(id, seed);
    std::printf("%s\n", calcap::format_result(r).c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  return failed == 0 ? 0 : 1;
}
