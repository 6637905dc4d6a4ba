#include <cstdlib>
#include <iostream>
#include <string>

#include "bbh/acceptance.hpp"

// Runs every acceptance criterion; exit status 0 only when all pass.
// Optional arguments: worker count, then an archive directory.
int main(int argc, char** argv) {
  bbh::AcceptOptions opt;
  if (argc > 1) opt.workers = std::max(1, std::atoi(argv[1]));
  if (argc > 2) opt.archive_dir = argv[2];
  const auto results = bbh::run_acceptance(opt, std::cout);
  int failed = 0;
  for (const auto& r : results) failed += !r.pass;
  std::cout << (failed ? "FAIL" : "PASS") << " acceptance: " << results.size() - failed << "/" << results.size()
            << " criteria\n";
  return failed ? 1 : 0;
}
