// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: rra_acceptance [--level quick|full] [--only NAME]...

#include <cstdio>
#include <string>

#include "rra/verify.h"

int main(int argc, char** argv) {
  rra::VerifyOptions opt;
  opt.level = rra::VerifyLevel::kFull;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--level" && i + 1 < argc) {
      const std::string level = argv[++i];
      if (level == "quick") {
        opt.level = rra::VerifyLevel::kQuick;
      } else if (level != "full") {
        std::fprintf(stderr, "unknown level '%s'\n", level.c_str());
        return 2;
      }
    } else if (arg == "--only" && i + 1 < argc) {
      opt.only.emplace_back(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--level quick|full] [--only NAME]...\n", argv[0]);
      return 2;
    }
  }
  opt.on_result = [](const rra::CriterionResult& r) {
    std::printf("%s\n", rra::format_result(r).c_str());
    std::fflush(stdout);
  };
  try {
    const auto results = rra::run_verify_suite(opt);
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::printf("%zu of %zu criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance run aborted: %s\n", e.what());
    return 1;
  }
}
