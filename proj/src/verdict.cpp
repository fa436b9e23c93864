#include "scrooge/verdict.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace scrooge {

VerdictRecord VerdictRecord::two_sided(std::string claim, double measured, double target,
                                       double tolerance, double sigma, std::string provenance,
                                       bool hard) {
  VerdictRecord v;
  v.claim = std::move(claim);
  v.measured = measured;
  v.target = target;
  v.tolerance = tolerance;
  v.sigma = sigma;
  v.pass = std::abs(measured - target) <= tolerance;
  v.hard = hard;
  v.provenance = std::move(provenance);
  return v;
}

VerdictRecord VerdictRecord::upper_bound(std::string claim, double measured, double bound,
                                         double sigma, std::string provenance, bool hard) {
  VerdictRecord v;
  v.claim = std::move(claim);
  v.measured = measured;
  v.target = bound;
  v.tolerance = 0.0;
  v.sigma = sigma;
  v.pass = measured <= bound;
  v.hard = hard;
  v.provenance = std::move(provenance);
  return v;
}

VerdictRecord VerdictRecord::lower_bound(std::string claim, double measured, double bound,
                                         double sigma, std::string provenance, bool hard) {
  VerdictRecord v;
  v.claim = std::move(claim);
  v.measured = measured;
  v.target = bound;
  v.tolerance = 0.0;
  v.sigma = sigma;
  v.pass = measured >= bound;
  v.hard = hard;
  v.provenance = std::move(provenance);
  return v;
}

VerdictRecord VerdictRecord::boolean(std::string claim, bool ok, std::string provenance,
                                     bool hard) {
  VerdictRecord v;
  v.claim = std::move(claim);
  v.measured = ok ? 1.0 : 0.0;
  v.target = 1.0;
  v.pass = ok;
  v.hard = hard;
  v.provenance = std::move(provenance);
  return v;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  // Shortest representation that round-trips.
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

std::string verdict_json_line(const VerdictRecord& v) {
  nlohmann::ordered_json j;
  j["claim"] = v.claim;
  j["measured"] = format_double(v.measured);
  j["target"] = format_double(v.target);
  j["tolerance"] = format_double(v.tolerance);
  j["sigma"] = format_double(v.sigma);
  j["pass"] = v.pass;
  j["hard"] = v.hard;
  j["provenance"] = v.provenance;
  return j.dump();
}

void write_verdicts_jsonl(const std::vector<VerdictRecord>& verdicts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const VerdictRecord& v : verdicts) out << verdict_json_line(v) << '\n';
}

void write_verdicts_csv(const std::vector<VerdictRecord>& verdicts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "claim,measured,target,tolerance,sigma,pass,hard\n";
  for (const VerdictRecord& v : verdicts) {
    out << v.claim << ',' << format_double(v.measured) << ',' << format_double(v.target) << ','
        << format_double(v.tolerance) << ',' << format_double(v.sigma) << ','
        << (v.pass ? 1 : 0) << ',' << (v.hard ? 1 : 0) << '\n';
  }
}

void write_sweep_csv(const SweepTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << table.param_name << ",value,stderr,bound\n";
  for (size_t i = 0; i < table.param.size(); ++i) {
    out << format_double(table.param[i]) << ',' << format_double(table.value[i]) << ','
        << format_double(i < table.std_error.size() ? table.std_error[i] : 0.0) << ','
        << format_double(i < table.bound.size() ? table.bound[i] : 0.0) << '\n';
  }
}

void write_sweep_plot_script(const SweepTable& table, const std::string& csv_path,
                             const std::string& script_path) {
  std::ofstream out(script_path);
  if (!out) throw std::runtime_error("cannot open for writing: " + script_path);
  out << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel '" << table.param_name << "'\n"
      << "set ylabel 'value'\n"
      << "plot '" << csv_path << "' using 1:2:3 with yerrorlines title 'measured', \\\n"
      << "     '" << csv_path << "' using 1:4 with lines dashtype 2 title 'bound'\n";
}

}  // namespace scrooge
