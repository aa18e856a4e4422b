// Cross-layer reconciliation suite: one pass/fail line per criterion.
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "agekin/validate.hpp"

int main(int argc, char** argv) {
  agekin::ValidateOptions opt;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) opt.quick = true;
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc)
      opt.seed = std::strtoull(argv[++i], nullptr, 10);
    if (std::strcmp(argv[i], "--outdir") == 0 && i + 1 < argc)
      opt.outdir = argv[++i];
  }

  const auto results = agekin::run_validation(opt);
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-34s (%6.2fs)  %s\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.seconds, r.detail.c_str());
    if (!r.passed) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures == 0 ? 0 : 1;
}
