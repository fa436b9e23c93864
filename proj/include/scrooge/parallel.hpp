#pragma once

#include <omp.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace scrooge {

enum class Exec { Serial, Parallel };

// Execution policy for the Monte Carlo kernels. Samples are split into
// `num_blocks` contiguous index blocks (also the jackknife blocks); each block
// is accumulated serially in index order, blocks are reduced in block order.
// The result is therefore bit-identical for any worker count, and the serial
// path is the reference implementation the parallel one is tested against.
struct McOptions {
  int num_blocks = 50;
  Exec exec = Exec::Parallel;
  int workers = 0;  // 0 = OpenMP default
};

struct BlockSums {
  std::int64_t n_samples = 0;
  int n_stats = 0;
  // block-major: sums[b * n_stats + s]
  std::vector<double> sums;

  int n_blocks() const { return static_cast<int>(sums.size()) / n_stats; }

  double total(int stat) const {
    double acc = 0.0;
    for (int b = 0; b < n_blocks(); ++b) acc += sums[static_cast<size_t>(b) * n_stats + stat];
    return acc;
  }

  double block(int b, int stat) const { return sums[static_cast<size_t>(b) * n_stats + stat]; }

  // Count of samples handled by block b (blocks differ by at most one).
  std::int64_t block_count(int b) const {
    const int nb = n_blocks();
    std::int64_t base = n_samples / nb;
    std::int64_t rem = n_samples % nb;
    return base + (b < rem ? 1 : 0);
  }
};

// per_sample(i, stats_out) must write n_stats accumulands for sample i.
template <class PerSample>
BlockSums mc_block_sums(std::int64_t n_samples, int n_stats, PerSample&& per_sample,
                        const McOptions& opts = {}) {
  if (n_samples < 1) throw std::invalid_argument("mc_block_sums: n_samples must be >= 1");
  if (opts.num_blocks < 1) throw std::invalid_argument("mc_block_sums: need >= 1 block");
  const int nb = static_cast<int>(std::min<std::int64_t>(opts.num_blocks, n_samples));

  BlockSums out;
  out.n_samples = n_samples;
  out.n_stats = n_stats;
  out.sums.assign(static_cast<size_t>(nb) * n_stats, 0.0);

  const std::int64_t base = n_samples / nb;
  const std::int64_t rem = n_samples % nb;
  auto block_begin = [&](int b) {
    return b * base + std::min<std::int64_t>(b, rem);
  };

  auto run_block = [&](int b, std::vector<double>& scratch) {
    const std::int64_t begin = block_begin(b);
    const std::int64_t end = block_begin(b + 1);
    double* acc = out.sums.data() + static_cast<size_t>(b) * n_stats;
    for (std::int64_t i = begin; i < end; ++i) {
      per_sample(static_cast<std::uint64_t>(i), scratch.data());
      for (int s = 0; s < n_stats; ++s) acc[s] += scratch[static_cast<size_t>(s)];
    }
  };

  if (opts.exec == Exec::Serial) {
    std::vector<double> scratch(static_cast<size_t>(n_stats));
    for (int b = 0; b < nb; ++b) run_block(b, scratch);
  } else {
    int prev = 0;
    if (opts.workers > 0) {
      prev = omp_get_max_threads();
      omp_set_num_threads(opts.workers);
    }
#pragma omp parallel
    {
      std::vector<double> scratch(static_cast<size_t>(n_stats));
#pragma omp for schedule(dynamic, 1)
      for (int b = 0; b < nb; ++b) run_block(b, scratch);
    }
    if (opts.workers > 0) omp_set_num_threads(prev);
  }
  return out;
}

struct JackknifeEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Delete-one-block jackknife for a ratio of accumulated totals
// (sum w f) / (sum w); plain means use w identically 1.
JackknifeEstimate jackknife_ratio(const BlockSums& sums, int num_stat, int den_stat);

// Effective sample size (sum w)^2 / (sum w^2).
double effective_sample_size(const BlockSums& sums, int w_stat, int w2_stat);

}  // namespace scrooge
