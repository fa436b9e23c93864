// Acceptance suite runner: one pass/fail line per criterion, details per
// verdict. Exits nonzero if any hard verdict fails.

#include "scrooge/suite.hpp"
#include "scrooge/verdict.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  scrooge::suite::SuiteOptions opts;
  opts.seed = 7;
  if (const char* cli = std::getenv("SCROOGE_CLI")) opts.cli_path = cli;

  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      ids.push_back(std::atoi(argv[++i]));
    } else if (arg == "--seed" && i + 1 < argc) {
      opts.seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (arg == "--out-dir" && i + 1 < argc) {
      opts.out_dir = argv[++i];
    } else if (arg == "--cli" && i + 1 < argc) {
      opts.cli_path = argv[++i];
    } else {
      std::cerr << "usage: acceptance_suite [--criterion N]... [--seed S] [--out-dir DIR] "
                   "[--cli PATH]\n";
      return 2;
    }
  }
  if (ids.empty()) {
    for (int i = 1; i <= scrooge::suite::criterion_count(); ++i) ids.push_back(i);
  }

  bool ok = true;
  for (int id : ids) {
    scrooge::suite::CriterionResult result = scrooge::suite::run_criterion(id, opts);
    std::cout << (result.pass ? "[PASS]" : "[FAIL]") << " criterion " << result.id << " "
              << result.name << '\n';
    for (const scrooge::VerdictRecord& v : result.records) {
      std::cout << "    " << (v.pass ? "ok  " : (v.hard ? "FAIL" : "soft")) << "  " << v.claim
                << "  measured=" << scrooge::format_double(v.measured)
                << "  target=" << scrooge::format_double(v.target)
                << "  tolerance=" << scrooge::format_double(v.tolerance)
                << "  sigma=" << scrooge::format_double(v.sigma) << '\n';
    }
    ok &= result.pass;
  }
  return ok ? 0 : 1;
}
