#pragma once

#include "scrooge/entropies.hpp"
#include "scrooge/types.hpp"
#include "scrooge/verdict.hpp"

#include <span>
#include <string>
#include <vector>

namespace scrooge::suite {

struct SuiteOptions {
  std::uint64_t seed = 7;
  int workers = 0;          // 0 = OpenMP default
  std::string out_dir;      // empty: no file artifacts
  bool fail_fast = false;
  std::string cli_path;     // needed by the determinism criterion
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = true;  // conjunction of hard verdicts
  std::vector<VerdictRecord> records;
};

int criterion_count();
std::string criterion_name(int id);
CriterionResult run_criterion(int id, const SuiteOptions& opts);

// Level "desk" runs criteria 1-13 (the computational checks); the
// determinism criterion 14 re-executes the desk suite through the CLI and is
// only run when requested explicitly. "smoke" is a fast subset for plumbing
// tests.
std::vector<int> criteria_for_level(const std::string& level);

// Runs the given criteria and, when out_dir is set, writes verdicts.jsonl,
// verdicts.csv and summary.json (plus per-criterion sweep files).
std::vector<CriterionResult> run_suite(std::span<const int> ids, const SuiteOptions& opts);

// Independent oracle for S*_inf at dim(A) = 2: dense Bloch-sphere grid at
// 1-degree resolution followed by local coordinate refinement.
double bloch_grid_post_measurement_min_entropy(const DensityMatrix& rho_ab, const Partition& part,
                                               const std::string& a_label = "A");

}  // namespace scrooge::suite
