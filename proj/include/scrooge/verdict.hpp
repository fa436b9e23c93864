#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scrooge {

// One checked claim: measured vs target under a tolerance policy.
// `hard` verdicts gate exit codes; soft ones are logged trends.
struct VerdictRecord {
  std::string claim;        // stable id, e.g. "pt-moment-k2"
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  double sigma = 0.0;       // statistical std error when applicable
  bool pass = false;
  bool hard = true;
  std::string provenance;   // one-line statement of the claim being tested

  static VerdictRecord two_sided(std::string claim, double measured, double target,
                                 double tolerance, double sigma, std::string provenance,
                                 bool hard = true);
  // pass iff measured <= bound (+ slack already folded into bound)
  static VerdictRecord upper_bound(std::string claim, double measured, double bound, double sigma,
                                   std::string provenance, bool hard = true);
  // pass iff measured >= bound
  static VerdictRecord lower_bound(std::string claim, double measured, double bound, double sigma,
                                   std::string provenance, bool hard = true);
  static VerdictRecord boolean(std::string claim, bool ok, std::string provenance,
                               bool hard = true);
};

// Canonical shortest-roundtrip double formatting shared by all emitters, so
// identical runs produce byte-identical files.
std::string format_double(double v);

std::string verdict_json_line(const VerdictRecord& v);
void write_verdicts_jsonl(const std::vector<VerdictRecord>& verdicts, const std::string& path);
void write_verdicts_csv(const std::vector<VerdictRecord>& verdicts, const std::string& path);

// CSV sweep table: fixed column layout (param, value, stderr, bound).
struct SweepTable {
  std::string param_name = "param";
  std::vector<double> param;
  std::vector<double> value;
  std::vector<double> std_error;
  std::vector<double> bound;
};
void write_sweep_csv(const SweepTable& table, const std::string& path);
// Companion gnuplot script plotting value vs param from the CSV.
void write_sweep_plot_script(const SweepTable& table, const std::string& csv_path,
                             const std::string& script_path);

}  // namespace scrooge
