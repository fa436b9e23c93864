#include "scrooge/bounds.hpp"
#include "scrooge/ensembles.hpp"
#include "scrooge/entropies.hpp"
#include "scrooge/linalg.hpp"
#include "scrooge/moments.hpp"
#include "scrooge/output_stats.hpp"
#include "scrooge/qdm_io.hpp"
#include "scrooge/rdist.hpp"
#include "scrooge/suite.hpp"
#include "scrooge/verdict.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace scrooge;
using nlohmann::json;
namespace fs = std::filesystem;

struct GlobalOpts {
  std::uint64_t seed = 7;
  int workers = 0;
  std::string out_dir;
  std::string format = "json";  // json | csv
  bool fail_fast = false;
};

void print_verdict(const VerdictRecord& v) {
  std::cout << (v.pass ? "[PASS] " : (v.hard ? "[FAIL] " : "[soft] ")) << v.claim
            << "  measured=" << format_double(v.measured) << " target=" << format_double(v.target)
            << " tolerance=" << format_double(v.tolerance) << " sigma=" << format_double(v.sigma)
            << '\n';
}

void write_records(const GlobalOpts& g, const std::string& name,
                   const std::vector<VerdictRecord>& records) {
  if (g.out_dir.empty()) return;
  fs::create_directories(g.out_dir);
  if (g.format == "csv") {
    write_verdicts_csv(records, (fs::path(g.out_dir) / (name + "-verdicts.csv")).string());
  } else {
    write_verdicts_jsonl(records, (fs::path(g.out_dir) / (name + "-verdicts.jsonl")).string());
  }
  json meta;
  meta["experiment"] = name;
  meta["seed"] = g.seed;
  meta["workers"] = g.workers;
  std::ofstream out(fs::path(g.out_dir) / (name + "-meta.json"));
  out << meta.dump(2) << '\n';
}

int finish(const GlobalOpts& g, const std::string& name, std::vector<VerdictRecord> records) {
  bool ok = true;
  for (const VerdictRecord& v : records) {
    print_verdict(v);
    if (v.hard) ok &= v.pass;
  }
  write_records(g, name, records);
  return ok ? 0 : 1;
}

// Helper shared by flag parsing and --config: take the flag value when the
// user passed it, otherwise the config entry, otherwise the default already
// in place.
template <class T>
void merge(const json& cfg, const std::string& key, T& value, bool flag_given) {
  if (!flag_given && cfg.contains(key)) value = cfg.at(key).get<T>();
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error at byte " + std::to_string(e.byte) + ": " +
                             e.what());
  }
}

Partition blocks_partition(const std::string& blocks) {
  std::vector<std::pair<std::string, int>> spec;
  const std::string labels = "ABCDEFGH";
  std::stringstream ss(blocks);
  std::string tok;
  size_t idx = 0;
  while (std::getline(ss, tok, ',')) {
    if (idx >= labels.size()) throw ValidationError("too many blocks");
    spec.emplace_back(std::string(1, labels[idx++]), std::stoi(tok));
  }
  return Partition::qubit_blocks(spec);
}

// --- experiments ------------------------------------------------------------

int experiment_sample(const GlobalOpts& g, const std::string& rho_spec,
                      const std::string& sampler_kind, std::int64_t n) {
  DensityMatrix rho = parse_rho_spec(rho_spec);
  EnsembleSampler sampler =
      sampler_kind == "haar"         ? EnsembleSampler::haar(rho.dim(), g.seed)
      : sampler_kind == "purification" ? EnsembleSampler::scrooge_purification(rho, g.seed)
                                       : EnsembleSampler::scrooge_distortion(rho, g.seed);
  Matrix first = mc_moment_matrix(sampler, 1, n);
  // Entrywise agreement with rho within 4 sigma (sigma ~ 1/sqrt(n) per entry).
  double scale = 4.0 / std::sqrt(static_cast<double>(n));
  double worst = (first - rho.matrix()).cwiseAbs().maxCoeff();
  std::vector<VerdictRecord> records;
  records.push_back(VerdictRecord::upper_bound(
      "first-moment-law", worst, scale, scale / 4.0,
      "the empirical first moment reproduces the background state entrywise"));
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    save_qdm_json(DensityMatrix((first + first.adjoint()) / 2.0, rho.factor_dims()),
                  (fs::path(g.out_dir) / "first-moment.json").string());
  }
  std::cout << "degenerate draws: " << sampler.degenerate_draw_count() << '\n';
  return finish(g, "sample", std::move(records));
}

int experiment_moments(const GlobalOpts& g, const std::string& rho_spec, int k, std::int64_t n) {
  DensityMatrix rho = parse_rho_spec(rho_spec);
  EnsembleSampler sampler = EnsembleSampler::scrooge_distortion(rho, g.seed);
  MomentMatrices mats = full_moment_matrices(rho, sampler, k, n);
  double additive = trace_norm_distance(mats.mc, mats.approx);
  std::vector<VerdictRecord> records;
  records.push_back(VerdictRecord::upper_bound(
      "moment-matrix-additive-error", additive,
      10.0 / std::sqrt(static_cast<double>(n)) * std::pow(2.0, k) * rho.dim() + 10.0 * moment_error_bound(rho, k),
      0.0, "trace-norm distance between sampled and closed-form moment matrices", false));
  std::cout << "additive error ||chi_mc - chi_appr||_1 = " << format_double(additive) << '\n';
  return finish(g, "moments", std::move(records));
}

int experiment_relerr(const GlobalOpts& g, const std::string& rho_spec, int k, std::int64_t n,
                      int n_probes) {
  DensityMatrix rho = parse_rho_spec(rho_spec);
  EnsembleSampler sampler = EnsembleSampler::scrooge_distortion(rho, g.seed);
  auto probes = computational_probe_set(rho, k, splitmix64(g.seed), n_probes);
  ErrorReport report = relative_error_probes(rho, sampler, k, probes, n);
  std::vector<VerdictRecord> records;
  records.push_back(VerdictRecord::upper_bound(
      "relative-error-vs-bound", report.epsilon_measured, 10.0 * report.epsilon_bound, 0.0,
      "probe-measured relative error stays below ten times 11 k^2 2^{-S_inf/2}"));
  return finish(g, "relerr", std::move(records));
}

int experiment_subsys(const GlobalOpts& g, const std::string& rho_spec, int k, int traced,
                      std::int64_t n, int n_probes) {
  DensityMatrix rho = parse_rho_spec(rho_spec);
  int n_bits = 0;
  while ((Index(1) << n_bits) < rho.dim()) ++n_bits;
  if ((Index(1) << n_bits) != rho.dim()) throw ValidationError("subsys: dimension is not 2^n");
  if (traced < 1 || traced >= n_bits) throw ValidationError("subsys: bad traced-qubit count");
  DensityMatrix qubit_rho = rho.factor_dims().size() == static_cast<size_t>(n_bits)
                                ? rho
                                : rho.with_factor_dims(std::vector<Index>(static_cast<size_t>(n_bits), 2));
  Partition part = Partition::qubit_blocks({{"A", n_bits - traced}, {"B", traced}});
  EnsembleSampler sampler = EnsembleSampler::scrooge_distortion(qubit_rho, g.seed);
  ErrorReport report = subsystem_moment_error(qubit_rho, sampler, k, part, "A", n_probes, n,
                                              splitmix64(g.seed), {}, true);
  std::vector<VerdictRecord> records;
  records.push_back(VerdictRecord::upper_bound(
      "subsystem-collapse-vs-bound", report.epsilon_measured, 10.0 * report.epsilon_bound, 0.0,
      "traced-moment deviation stays below ten times k^2 2^{-S*_inf(B)}"));
  return finish(g, "subsys", std::move(records));
}

int experiment_entropies(const GlobalOpts& g, const std::string& rho_spec,
                         const std::string& blocks) {
  if (blocks.empty()) throw ValidationError("entropies: --blocks is required (e.g. 2,2)");
  DensityMatrix rho = parse_rho_spec(rho_spec);
  Partition part = blocks_partition(blocks);
  if (rho.dim() != part.total_dim()) {
    throw DimensionError("entropies: blocks do not match the state dimension");
  }
  DensityMatrix arranged = rho.with_factor_dims(part.factor_dims());
  OptimizerOptions opts;
  opts.seed = splitmix64(g.seed);
  EntropyReport report = build_entropy_report(arranged, part, "A", "B", opts);
  json j;
  j["s_inf"] = format_double(report.s_inf);
  for (const auto& [alpha, value] : report.s_alpha) {
    j["s_alpha"][format_double(alpha)] = format_double(value);
  }
  j["s_hat_b_given_a"] = format_double(report.s_hat_b_given_a);
  j["s_star_b"] = format_double(report.s_star_b);
  j["s_star_exact"] = report.s_star_exact;
  j["s_star_restarts"] = report.s_star_restarts;
  j["subentropy"] = format_double(report.subentropy_bits);
  std::cout << j.dump(2) << '\n';
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    std::ofstream out(fs::path(g.out_dir) / "entropies.json");
    out << j.dump(2) << '\n';
  }
  return 0;
}

int experiment_pt(const GlobalOpts& g, const std::string& rho_spec, Index x, int k,
                  std::int64_t n) {
  DensityMatrix rho = parse_rho_spec(rho_spec);
  EnsembleSampler sampler = EnsembleSampler::scrooge_distortion(rho, g.seed);
  MomentEstimate est = pt_moment_ratio(sampler, rho, x, k, n);
  double delta = moment_error_bound(rho, k);
  std::vector<VerdictRecord> records;
  records.push_back(VerdictRecord::two_sided(
      "pt-moment-k" + std::to_string(k), est.value.real(), 1.0,
      4.0 * est.std_error + 10.0 * delta, est.std_error,
      "the k-th output-probability moment equals k! p^k up to the moment-formula error"));
  return finish(g, "pt", std::move(records));
}

int experiment_wishart(const GlobalOpts& g, const std::string& rho_spec, Index x, Index xp, int a,
                       int b, int c, std::int64_t n) {
  DensityMatrix rho = parse_rho_spec(rho_spec);
  EnsembleSampler sampler = EnsembleSampler::scrooge_distortion(rho, g.seed);
  double closed = wishart_joint_moment_closed(rho, x, xp, a, b, c);
  MomentEstimate est = wishart_joint_moment_mc(sampler, x, xp, a, b, c, n);
  std::vector<VerdictRecord> records;
  records.push_back(VerdictRecord::two_sided(
      "wishart-a" + std::to_string(a) + "b" + std::to_string(b) + "c" + std::to_string(c),
      est.value.real(), closed, 4.0 * est.std_error, est.std_error,
      "joint output-probability moment matches the 2x2 Wishart closed form"));
  return finish(g, "wishart", std::move(records));
}

int experiment_tvd(const GlobalOpts& g, const std::string& rho_spec, std::int64_t n) {
  DensityMatrix rho = parse_rho_spec(rho_spec);
  OutputDistribution background = output_distribution(rho);
  EnsembleSampler sampler = EnsembleSampler::scrooge_distortion(rho, g.seed);
  BlockSums sums = mc_block_sums(n, 3, [&](std::uint64_t i, double* out) {
    PureState psi = sampler.sample(i);
    OutputDistribution dist = output_distribution(psi);
    out[0] = psi.weight;
    out[1] = psi.weight * tvd(dist, background);
    out[2] = psi.weight * psi.weight;
  });
  JackknifeEstimate est = jackknife_ratio(sums, 1, 0);
  std::vector<VerdictRecord> records;
  records.push_back(VerdictRecord::lower_bound(
      "tvd-far", est.value, 1.0 / 3.0 - 0.05, est.std_error,
      "expected distance between sampled and background output distributions is at least 1/3"));
  return finish(g, "tvd", std::move(records));
}

int experiment_cmi(const GlobalOpts& g, const std::string& rho_spec, const std::string& blocks,
                   std::int64_t n) {
  DensityMatrix rho = parse_rho_spec(rho_spec);
  Partition part = blocks_partition(blocks);
  DensityMatrix arranged = rho.with_factor_dims(part.factor_dims());
  MomentEstimate est = avg_cmi_scrooge(arranged, part, n, g.seed);
  double target = quantized_cmi_target(arranged, part);
  std::vector<VerdictRecord> records;
  records.push_back(VerdictRecord::two_sided(
      "cmi-subentropy-combination", est.value.real(), target, 4.0 * est.std_error, est.std_error,
      "average conditional mutual information equals Q(A) + Q(C) - Q(AC)"));
  records.push_back(VerdictRecord::two_sided(
      "cmi-quantized-0.61", est.value.real(), 0.61, 0.05, est.std_error,
      "distance from the asymptotic quantized value, logged", false));
  return finish(g, "cmi", std::move(records));
}

int experiment_noise(const GlobalOpts& g, const std::string& rho_spec,
                     const std::string& gamma_list, std::int64_t n) {
  DensityMatrix rho = parse_rho_spec(rho_spec);
  std::vector<double> gammas;
  {
    std::stringstream ss(gamma_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) gammas.push_back(std::stod(tok));
  }
  if (gammas.size() < 2) throw ValidationError("noise: need at least two gamma values");
  OutputDistribution background = output_distribution(rho);
  std::vector<OutputDistribution> noisy_bg;
  for (double gamma : gammas) noisy_bg.push_back(apply_depolarizing(background, gamma));
  EnsembleSampler sampler = EnsembleSampler::scrooge_distortion(rho, g.seed);
  const int ng = static_cast<int>(gammas.size());
  BlockSums sums = mc_block_sums(n, 2 + ng, [&](std::uint64_t i, double* out) {
    PureState psi = sampler.sample(i);
    OutputDistribution dist = output_distribution(psi);
    out[0] = psi.weight;
    out[1] = psi.weight * psi.weight;
    for (int gi = 0; gi < ng; ++gi) {
      out[2 + gi] = psi.weight * tvd(apply_depolarizing(dist, gammas[static_cast<size_t>(gi)]),
                                     noisy_bg[static_cast<size_t>(gi)]);
    }
  });
  SweepTable sweep;
  sweep.param_name = "gamma";
  bool decreasing = true;
  double prev = 0.0;
  for (int gi = 0; gi < ng; ++gi) {
    JackknifeEstimate est = jackknife_ratio(sums, 2 + gi, 0);
    if (gi > 0) decreasing &= est.value < prev;
    prev = est.value;
    sweep.param.push_back(gammas[static_cast<size_t>(gi)]);
    sweep.value.push_back(est.value);
    sweep.std_error.push_back(est.std_error);
    sweep.bound.push_back(0.0);
  }
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    write_sweep_csv(sweep, (fs::path(g.out_dir) / "noise-tvd-sweep.csv").string());
    write_sweep_plot_script(sweep, "noise-tvd-sweep.csv",
                            (fs::path(g.out_dir) / "noise-tvd-sweep.gp").string());
  }
  std::vector<VerdictRecord> records;
  records.push_back(VerdictRecord::boolean(
      "noise-tvd-strictly-decreasing", decreasing,
      "noisy output distributions collapse monotonically towards the background"));
  return finish(g, "noise", std::move(records));
}

int experiment_rdist(const GlobalOpts& g, const std::string& rho_spec, std::int64_t n) {
  DensityMatrix rho = parse_rho_spec(rho_spec);
  std::vector<VerdictRecord> records;
  // Mean and second-moment laws of the Haar weight.
  std::vector<double> rs = sample_r(rho, n, g.seed);
  double mean = 0.0, second = 0.0;
  for (double r : rs) {
    mean += r;
    second += r * r;
  }
  mean /= static_cast<double>(n);
  second /= static_cast<double>(n);
  double var = 0.0;
  for (double r : rs) var += (r - mean) * (r - mean);
  var /= static_cast<double>(n - 1);
  double sigma = std::sqrt(var / static_cast<double>(n));
  records.push_back(VerdictRecord::two_sided("rdist-mean", mean, 1.0, 4.0 * sigma, sigma,
                                             "the Haar weight has unit mean"));
  double purity = 0.0;
  for (double lam : rho.spectrum()) purity += lam * lam;
  // var of r^2 estimate
  double var2 = 0.0;
  for (double r : rs) var2 += (r * r - second) * (r * r - second);
  var2 /= static_cast<double>(n - 1);
  double sigma2 = std::sqrt(var2 / static_cast<double>(n));
  records.push_back(VerdictRecord::two_sided(
      "rdist-second-moment", second, 1.0 + purity, 4.0 * sigma2, sigma2,
      "the second moment of the Haar weight is 1 + tr rho^2"));
  if (std::floor(1.0 / rho.max_eigenvalue()) >= 8) {
    for (auto verdict : moment_bounds_check(rho, n, splitmix64(g.seed))) {
      records.push_back(std::move(verdict));
    }
  }
  if (rho.dim() >= 2 && rho.dim() <= 12 && !g.out_dir.empty()) {
    // Density table for external plotting.
    auto spectrum = rho.spectrum();
    double hi = static_cast<double>(rho.dim()) * spectrum.back() + 1e-9;
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(hi * i / 400.0);
    try {
      auto pdf = spline_pdf(rho, grid);
      SweepTable table;
      table.param_name = "r";
      for (size_t i = 0; i < grid.size(); ++i) {
        table.param.push_back(grid[i]);
        table.value.push_back(pdf[i]);
        table.std_error.push_back(0.0);
        table.bound.push_back(0.0);
      }
      fs::create_directories(g.out_dir);
      write_sweep_csv(table, (fs::path(g.out_dir) / "r-density.csv").string());
    } catch (const ValidationError&) {
      // fully degenerate spectrum: the density is a point mass; skip the table
    }
  }
  return finish(g, "rdist", std::move(records));
}

int experiment_bounds(const GlobalOpts& g, double s_inf, int k, double epsilon, double eta,
                      int n_qubits, double h_norm, double delta, bool has_delta,
                      const std::string& cardinality) {
  BoundInputs in;
  in.s_inf = s_inf;
  in.k = k;
  in.epsilon = epsilon;
  in.eta = eta;
  in.n_qubits = n_qubits;
  in.h_norm = h_norm;
  if (has_delta) in.delta_override = delta;
  json j;
  BitsBound bits = bits_lower_bound(in);
  j["bits_lower_bound"] = bits.vacuous ? json("vacuous") : json(format_double(bits.bits));
  j["temporal_time_bound"] = format_double(temporal_time_bound(in));
  if (k * s_inf > 1.0) {
    ComplexityBound cb = complexity_bound(in);
    j["complexity_bound_basic"] = format_double(cb.basic);
    j["complexity_bound_refined"] = format_double(cb.refined);
  }
  std::cout << j.dump(2) << '\n';
  std::vector<VerdictRecord> records;
  if (!cardinality.empty()) {
    std::stringstream ss(cardinality);
    std::string tok;
    std::vector<long> vals;
    while (std::getline(ss, tok, ':')) vals.push_back(std::stol(tok));
    if (vals.size() != 3) throw ValidationError("bounds: --cardinality wants d:k:r");
    CardinalityCheck check =
        cardinality_check(make_random_rank(vals[0], vals[0], splitmix64(g.seed)),
                          static_cast<int>(vals[1]), static_cast<int>(vals[2]), g.seed);
    records.push_back(check.verdict);
  }
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    std::ofstream out(fs::path(g.out_dir) / "bounds.json");
    out << j.dump(2) << '\n';
  }
  return finish(g, "bounds", std::move(records));
}

int experiment_temporal(const GlobalOpts& g, Index dim, int k, const std::string& t_list,
                        std::int64_t n) {
  Hamiltonian h = make_gue_hamiltonian(dim, splitmix64(g.seed ^ 0x7477ull), std::log2(dim));
  Vector psi0 = sample_haar_vector(dim, splitmix64(g.seed ^ 0x7073ull), 0);
  std::vector<double> horizons;
  {
    std::stringstream ss(t_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) horizons.push_back(std::stod(tok));
  }
  auto sweep = temporal_additive_error_sweep(h, psi0, k, horizons, n, g.seed);
  SweepTable table;
  table.param_name = "T";
  for (const auto& point : sweep) {
    table.param.push_back(point.horizon);
    table.value.push_back(point.additive_error);
    table.std_error.push_back(0.0);
    table.bound.push_back(0.0);
  }
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    write_sweep_csv(table, (fs::path(g.out_dir) / "temporal-sweep.csv").string());
    write_sweep_plot_script(table, "temporal-sweep.csv",
                            (fs::path(g.out_dir) / "temporal-sweep.gp").string());
  }
  std::vector<VerdictRecord> records;
  records.push_back(VerdictRecord::boolean(
      "temporal-error-shrinks", sweep.front().additive_error > sweep.back().additive_error,
      "the additive moment error of the temporal ensemble falls as the horizon grows",
      /*hard=*/false));
  for (const auto& point : sweep) {
    std::cout << "T=" << format_double(point.horizon)
              << "  additive_error=" << format_double(point.additive_error) << '\n';
  }
  return finish(g, "temporal", std::move(records));
}

int experiment_suite(const GlobalOpts& g, const std::string& level, const std::string& cli_path) {
  suite::SuiteOptions opts;
  opts.seed = g.seed;
  opts.workers = g.workers;
  opts.out_dir = g.out_dir;
  opts.fail_fast = g.fail_fast;
  opts.cli_path = cli_path;
  auto ids = suite::criteria_for_level(level);
  auto results = suite::run_suite(ids, opts);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << " " << r.name
              << '\n';
    ok &= r.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scrooge-ensemble numerical laboratory"};
  app.require_subcommand(1);

  GlobalOpts g;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (keys mirror the flags)");
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--workers", g.workers, "worker threads (0 = default)");
  app.add_option("--out-dir", g.out_dir, "artifact directory");
  app.add_option("--format", g.format, "artifact format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--fail-fast", g.fail_fast, "stop at the first failing criterion");

  std::string rho_spec = "flat:256:64";
  std::string sampler_kind = "distortion";
  std::string blocks;
  std::string gamma_list = "0,0.05,0.1,0.2,0.4";
  std::string t_list = "0,1,10,100,1000";
  std::string level = "desk";
  std::string cardinality;
  std::string cli_path;
  std::int64_t n_samples = 100000;
  int k = 2, n_probes = 16, traced = 1;
  Index x = 0, xp = 1, dim = 16;
  int wa = 0, wb = 1, wc = 1;
  double s_inf = 8, epsilon = 0, eta = 1, h_norm = 0, delta = 0;
  int n_qubits = 8;

  auto* sample = app.add_subcommand("sample", "draw ensemble samples, check the first-moment law");
  sample->add_option("--rho", rho_spec);
  sample->add_option("--sampler", sampler_kind)->check(CLI::IsMember({"haar", "distortion", "purification"}));
  sample->add_option("--n-samples", n_samples);

  auto* moments_cmd = app.add_subcommand("moments", "full moment matrices, sampled vs closed form");
  moments_cmd->add_option("--rho", rho_spec);
  moments_cmd->add_option("--k", k);
  moments_cmd->add_option("--n-samples", n_samples);

  auto* relerr = app.add_subcommand("relerr", "probe-measured relative moment error");
  relerr->add_option("--rho", rho_spec);
  relerr->add_option("--k", k);
  relerr->add_option("--n-samples", n_samples);
  relerr->add_option("--probes", n_probes);

  auto* subsys = app.add_subcommand("subsys", "subsystem moment collapse");
  subsys->add_option("--rho", rho_spec);
  subsys->add_option("--k", k);
  subsys->add_option("--traced", traced, "number of traced-out qubits");
  subsys->add_option("--n-samples", n_samples);
  subsys->add_option("--probes", n_probes);

  auto* entropies_cmd = app.add_subcommand("entropies", "entropy report for a bipartition");
  entropies_cmd->add_option("--rho", rho_spec);
  entropies_cmd->add_option("--blocks", blocks, "qubit block sizes, e.g. 2,2");

  auto* pt = app.add_subcommand("pt", "rescaled output-probability moments");
  pt->add_option("--rho", rho_spec);
  pt->add_option("--x", x);
  pt->add_option("--k", k);
  pt->add_option("--n-samples", n_samples);

  auto* wishart = app.add_subcommand("wishart", "joint output-probability moments");
  wishart->add_option("--rho", rho_spec);
  wishart->add_option("--x", x);
  wishart->add_option("--xp", xp);
  wishart->add_option("--a", wa);
  wishart->add_option("--b", wb);
  wishart->add_option("--c", wc);
  wishart->add_option("--n-samples", n_samples);

  auto* tvd_cmd = app.add_subcommand("tvd", "distance of sampled output distributions from the background");
  tvd_cmd->add_option("--rho", rho_spec);
  tvd_cmd->add_option("--n-samples", n_samples);

  auto* cmi_cmd = app.add_subcommand("cmi", "average conditional mutual information");
  cmi_cmd->add_option("--rho", rho_spec);
  cmi_cmd->add_option("--blocks", blocks, "qubit block sizes for A,B,C, e.g. 2,2,2");
  cmi_cmd->add_option("--n-samples", n_samples);

  auto* noise = app.add_subcommand("noise", "depolarizing-noise collapse sweep");
  noise->add_option("--rho", rho_spec);
  noise->add_option("--gammas", gamma_list);
  noise->add_option("--n-samples", n_samples);

  auto* rdist_cmd = app.add_subcommand("rdist", "Haar-weight distribution checks");
  rdist_cmd->add_option("--rho", rho_spec);
  rdist_cmd->add_option("--n-samples", n_samples);

  auto* bounds_cmd = app.add_subcommand("bounds", "randomness / time / complexity bound values");
  bounds_cmd->add_option("--s-inf", s_inf);
  bounds_cmd->add_option("--k", k);
  bounds_cmd->add_option("--epsilon", epsilon);
  bounds_cmd->add_option("--eta", eta);
  bounds_cmd->add_option("--n", n_qubits);
  bounds_cmd->add_option("--h-norm", h_norm);
  auto* delta_opt = bounds_cmd->add_option("--delta", delta, "override the moment-formula error");
  bounds_cmd->add_option("--cardinality", cardinality, "run the discrete-ensemble check, d:k:r");

  auto* temporal_cmd = app.add_subcommand("temporal", "temporal-ensemble additive error sweep");
  temporal_cmd->add_option("--dim", dim);
  temporal_cmd->add_option("--k", k);
  temporal_cmd->add_option("--t-list", t_list);
  temporal_cmd->add_option("--n-samples", n_samples);

  auto* suite_cmd = app.add_subcommand("suite", "acceptance suite");
  suite_cmd->add_option("--level", level)->check(CLI::IsMember({"desk", "full", "smoke"}));
  suite_cmd->add_option("--cli-path", cli_path, "path to this binary (determinism criterion)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json cfg = load_config(config_path);
    merge(cfg, "seed", g.seed, app.count("--seed") > 0);
    merge(cfg, "workers", g.workers, app.count("--workers") > 0);
    merge(cfg, "out_dir", g.out_dir, app.count("--out-dir") > 0);
    merge(cfg, "format", g.format, app.count("--format") > 0);
    if (g.workers > 0) omp_set_num_threads(g.workers);

    if (*sample) {
      merge(cfg, "rho", rho_spec, sample->count("--rho") > 0);
      merge(cfg, "sampler", sampler_kind, sample->count("--sampler") > 0);
      merge(cfg, "n_samples", n_samples, sample->count("--n-samples") > 0);
      return experiment_sample(g, rho_spec, sampler_kind, n_samples);
    }
    if (*moments_cmd) {
      merge(cfg, "rho", rho_spec, moments_cmd->count("--rho") > 0);
      merge(cfg, "k", k, moments_cmd->count("--k") > 0);
      merge(cfg, "n_samples", n_samples, moments_cmd->count("--n-samples") > 0);
      return experiment_moments(g, rho_spec, k, n_samples);
    }
    if (*relerr) {
      merge(cfg, "rho", rho_spec, relerr->count("--rho") > 0);
      merge(cfg, "k", k, relerr->count("--k") > 0);
      merge(cfg, "n_samples", n_samples, relerr->count("--n-samples") > 0);
      merge(cfg, "probes", n_probes, relerr->count("--probes") > 0);
      return experiment_relerr(g, rho_spec, k, n_samples, n_probes);
    }
    if (*subsys) {
      return experiment_subsys(g, rho_spec, k, traced, n_samples, n_probes);
    }
    if (*entropies_cmd) {
      merge(cfg, "rho", rho_spec, entropies_cmd->count("--rho") > 0);
      merge(cfg, "blocks", blocks, entropies_cmd->count("--blocks") > 0);
      return experiment_entropies(g, rho_spec, blocks);
    }
    if (*pt) {
      merge(cfg, "rho", rho_spec, pt->count("--rho") > 0);
      merge(cfg, "x", x, pt->count("--x") > 0);
      merge(cfg, "k", k, pt->count("--k") > 0);
      merge(cfg, "n_samples", n_samples, pt->count("--n-samples") > 0);
      return experiment_pt(g, rho_spec, x, k, n_samples);
    }
    if (*wishart) {
      return experiment_wishart(g, rho_spec, x, xp, wa, wb, wc, n_samples);
    }
    if (*tvd_cmd) {
      merge(cfg, "rho", rho_spec, tvd_cmd->count("--rho") > 0);
      merge(cfg, "n_samples", n_samples, tvd_cmd->count("--n-samples") > 0);
      return experiment_tvd(g, rho_spec, n_samples);
    }
    if (*cmi_cmd) {
      merge(cfg, "rho", rho_spec, cmi_cmd->count("--rho") > 0);
      merge(cfg, "blocks", blocks, cmi_cmd->count("--blocks") > 0);
      merge(cfg, "n_samples", n_samples, cmi_cmd->count("--n-samples") > 0);
      return experiment_cmi(g, rho_spec, blocks, n_samples);
    }
    if (*noise) {
      merge(cfg, "rho", rho_spec, noise->count("--rho") > 0);
      merge(cfg, "gammas", gamma_list, noise->count("--gammas") > 0);
      merge(cfg, "n_samples", n_samples, noise->count("--n-samples") > 0);
      return experiment_noise(g, rho_spec, gamma_list, n_samples);
    }
    if (*rdist_cmd) {
      merge(cfg, "rho", rho_spec, rdist_cmd->count("--rho") > 0);
      merge(cfg, "n_samples", n_samples, rdist_cmd->count("--n-samples") > 0);
      return experiment_rdist(g, rho_spec, n_samples);
    }
    if (*bounds_cmd) {
      return experiment_bounds(g, s_inf, k, epsilon, eta, n_qubits, h_norm, delta,
                               delta_opt->count() > 0, cardinality);
    }
    if (*temporal_cmd) {
      return experiment_temporal(g, dim, k, t_list, n_samples);
    }
    if (*suite_cmd) {
      merge(cfg, "level", level, suite_cmd->count("--level") > 0);
      if (cli_path.empty() && level == "full") cli_path = argv[0];
      return experiment_suite(g, level, cli_path);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
