// Benchmark of the block-parallel Monte Carlo kernels against the serial
// reference path, with an equality check on the accumulated results.

#include "scrooge/ensembles.hpp"
#include "scrooge/moments.hpp"
#include "scrooge/output_stats.hpp"
#include "scrooge/rdist.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

namespace {

using namespace scrooge;
using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn) {
  auto start = Clock::now();
  fn();
  auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

void report(const std::string& name, double serial_ms, double parallel_ms, double max_diff) {
  std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   max|diff| %.3g\n",
              name.c_str(), serial_ms, parallel_ms, serial_ms / parallel_ms, max_diff);
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", omp_get_max_threads());

  {
    DensityMatrix rho = make_flat_rank(256, 64);
    EnsembleSampler sampler = EnsembleSampler::scrooge_distortion(rho, 7);
    McOptions serial{50, Exec::Serial, 0};
    McOptions parallel{50, Exec::Parallel, 0};
    MomentEstimate a, b;
    double ts = time_ms([&] { a = pt_moment_ratio(sampler, rho, 3, 2, 200000, serial); });
    double tp = time_ms([&] { b = pt_moment_ratio(sampler, rho, 3, 2, 200000, parallel); });
    report("pt moment (d=256, N=2e5)", ts, tp,
           std::abs(a.value.real() - b.value.real()) + std::abs(a.std_error - b.std_error));
  }

  {
    DensityMatrix rho = make_random_rank(64, 64, 11);
    McOptions serial{50, Exec::Serial, 0};
    McOptions parallel{50, Exec::Parallel, 0};
    std::vector<double> a, b;
    double ts = time_ms([&] { a = sample_r(rho, 500000, 3, serial); });
    double tp = time_ms([&] { b = sample_r(rho, 500000, 3, parallel); });
    double diff = 0.0;
    for (size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    report("haar weight (d=64, N=5e5)", ts, tp, diff);
  }

  {
    Partition part = Partition::qubit_blocks({{"A", 2}, {"B", 2}, {"C", 2}});
    DensityMatrix rho = make_flat_rank(64, 64).with_factor_dims({2, 2, 2, 2, 2, 2});
    McOptions serial{50, Exec::Serial, 0};
    McOptions parallel{50, Exec::Parallel, 0};
    MomentEstimate a, b;
    double ts = time_ms([&] { a = avg_cmi_scrooge(rho, part, 4000, 5, serial); });
    double tp = time_ms([&] { b = avg_cmi_scrooge(rho, part, 4000, 5, parallel); });
    report("avg CMI (2+2+2, N=4e3)", ts, tp, std::abs(a.value.real() - b.value.real()));
  }

  {
    DensityMatrix rho = make_random_rank(16, 16, 13);
    EnsembleSampler sampler = EnsembleSampler::scrooge_purification(rho, 9);
    McOptions serial{50, Exec::Serial, 0};
    McOptions parallel{50, Exec::Parallel, 0};
    Matrix a, b;
    double ts = time_ms([&] { a = mc_moment_matrix(sampler, 2, 20000, serial); });
    double tp = time_ms([&] { b = mc_moment_matrix(sampler, 2, 20000, parallel); });
    report("purification chi2 (d=16)", ts, tp, (a - b).cwiseAbs().maxCoeff());
  }

  return 0;
}
