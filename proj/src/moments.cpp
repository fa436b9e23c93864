#include "scrooge/moments.hpp"

#include "scrooge/entropies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scrooge {

JackknifeEstimate jackknife_ratio(const BlockSums& sums, int num_stat, int den_stat) {
  const int nb = sums.n_blocks();
  const double num_total = sums.total(num_stat);
  const double den_total = sums.total(den_stat);
  JackknifeEstimate est;
  est.value = num_total / den_total;
  if (nb < 2) return est;
  std::vector<double> leave_one(static_cast<size_t>(nb));
  double mean = 0.0;
  for (int b = 0; b < nb; ++b) {
    double den = den_total - sums.block(b, den_stat);
    leave_one[static_cast<size_t>(b)] =
        den != 0.0 ? (num_total - sums.block(b, num_stat)) / den : est.value;
    mean += leave_one[static_cast<size_t>(b)];
  }
  mean /= nb;
  double var = 0.0;
  for (double v : leave_one) var += (v - mean) * (v - mean);
  est.std_error = std::sqrt(var * (nb - 1) / static_cast<double>(nb));
  return est;
}

double effective_sample_size(const BlockSums& sums, int w_stat, int w2_stat) {
  double w = sums.total(w_stat);
  double w2 = sums.total(w2_stat);
  return w2 > 0 ? w * w / w2 : 0.0;
}

double haar_prefactor(Index d, int k) {
  double p = 1.0;
  for (int l = 0; l < k; ++l) p *= static_cast<double>(d) / static_cast<double>(d + l);
  return p;
}

double moment_error_bound(double s_inf_bits, int k) {
  if (k <= 1) return 0.0;  // first moments are exact
  double m = std::floor(std::exp2(s_inf_bits));
  if (m < 1) m = 1;
  return 11.0 * k * k / std::sqrt(m);
}

double moment_error_bound(const DensityMatrix& rho, int k) {
  return moment_error_bound(min_entropy(rho), k);
}

Complex approx_moment_element(const DensityMatrix& rho, std::span<const Vector> bras,
                              std::span<const Vector> kets, bool with_prefactor) {
  const int k = static_cast<int>(bras.size());
  if (k < 1 || static_cast<int>(kets.size()) != k) {
    throw DimensionError("approx_moment_element: need k >= 1 matched bras/kets");
  }
  if (k > 6) throw ValidationError("approx_moment_element: k > 6 refused (k! blowup)");
  // Overlap matrix m[r][s] = <bra_r|rho|ket_s>; the permutation sum is its
  // permanent.
  Matrix overlaps(k, k);
  for (int s = 0; s < k; ++s) {
    Vector rho_ket = rho.matrix() * kets[s];
    for (int r = 0; r < k; ++r) overlaps(r, s) = bras[r].dot(rho_ket);
  }
  Complex sum = 0.0;
  for (const Permutation& pi : Permutation::all(k)) {
    Complex prod = 1.0;
    for (int r = 0; r < k; ++r) prod *= overlaps(r, pi.preimage(r));
    sum += prod;
  }
  if (with_prefactor) sum *= haar_prefactor(rho.dim(), k);
  return sum;
}

MomentEstimate mc_moment_element(const EnsembleSampler& sampler, std::span<const Vector> bras,
                                 std::span<const Vector> kets, std::int64_t n_samples,
                                 const McOptions& opts) {
  const int k = static_cast<int>(bras.size());
  if (k < 1 || static_cast<int>(kets.size()) != k) {
    throw DimensionError("mc_moment_element: need k >= 1 matched bras/kets");
  }
  if (n_samples < 100) throw ValidationError("mc_moment_element: need at least 100 samples");
  for (int r = 0; r < k; ++r) {
    if (bras[r].size() != sampler.dim() || kets[r].size() != sampler.dim()) {
      throw DimensionError("mc_moment_element: probe dimension mismatch");
    }
  }

  // stats: [w, w Re f, w Im f, w^2]
  BlockSums sums = mc_block_sums(
      n_samples, 4,
      [&](std::uint64_t i, double* out) {
        PureState psi = sampler.sample(i);
        Complex f = 1.0;
        for (int r = 0; r < k; ++r) {
          f *= bras[r].dot(psi.amplitudes) * psi.amplitudes.dot(kets[r]);
        }
        out[0] = psi.weight;
        out[1] = psi.weight * f.real();
        out[2] = psi.weight * f.imag();
        out[3] = psi.weight * psi.weight;
      },
      opts);

  JackknifeEstimate re = jackknife_ratio(sums, 1, 0);
  JackknifeEstimate im = jackknife_ratio(sums, 2, 0);
  MomentEstimate est;
  est.value = Complex(re.value, im.value);
  est.std_error = std::hypot(re.std_error, im.std_error);
  est.n_samples = n_samples;
  est.effective_samples = effective_sample_size(sums, 0, 3);
  est.weighted = sampler.weighted();
  est.low_quality = est.effective_samples < 30.0;
  return est;
}

namespace {

Index checked_power_dim(Index d, int k) {
  Index dk = 1;
  for (int i = 0; i < k; ++i) {
    dk *= d;
    if (dk > 4096) throw DimensionError("moment matrices: d^k exceeds the 4096 guard");
  }
  return dk;
}

std::vector<std::vector<int>> digit_table(Index d, int k, Index dk) {
  std::vector<std::vector<int>> digits(static_cast<size_t>(dk), std::vector<int>(k));
  for (Index idx = 0; idx < dk; ++idx) {
    Index rem = idx;
    for (int r = k - 1; r >= 0; --r) {
      digits[static_cast<size_t>(idx)][r] = static_cast<int>(rem % d);
      rem /= d;
    }
  }
  return digits;
}

}  // namespace

Matrix approx_moment_matrix(const DensityMatrix& rho, int k, bool with_prefactor) {
  const Index d = rho.dim();
  const Index dk = checked_power_dim(d, k);
  const auto digits = digit_table(d, k, dk);
  const auto perms = Permutation::all(k);
  const Matrix& r = rho.matrix();

  Matrix chi(dk, dk);
#pragma omp parallel for schedule(static)
  for (Index col = 0; col < dk; ++col) {
    for (Index row = 0; row < dk; ++row) {
      Complex sum = 0.0;
      for (const Permutation& pi : perms) {
        Complex prod = 1.0;
        for (int c = 0; c < k; ++c) {
          prod *= r(digits[static_cast<size_t>(row)][c],
                    digits[static_cast<size_t>(col)][pi.preimage(c)]);
        }
        sum += prod;
      }
      chi(row, col) = sum;
    }
  }
  if (with_prefactor) chi *= haar_prefactor(d, k);
  return chi;
}

Matrix mc_moment_matrix(const EnsembleSampler& sampler, int k, std::int64_t n_samples,
                        const McOptions& opts) {
  const Index d = sampler.dim();
  const Index dk = checked_power_dim(d, k);
  if (n_samples < 1) throw ValidationError("mc_moment_matrix: need samples");

  const int nb = static_cast<int>(std::min<std::int64_t>(opts.num_blocks, n_samples));
  const std::int64_t base = n_samples / nb;
  const std::int64_t rem = n_samples % nb;
  auto block_begin = [&](int b) { return b * base + std::min<std::int64_t>(b, rem); };

  std::vector<Matrix> block_acc(static_cast<size_t>(nb));
  std::vector<double> block_weight(static_cast<size_t>(nb), 0.0);
  const auto digits = digit_table(d, k, dk);

  auto run_block = [&](int b) {
    Matrix acc = Matrix::Zero(dk, dk);
    Vector tensor(dk);
    double wsum = 0.0;
    for (std::int64_t i = block_begin(b); i < block_begin(b + 1); ++i) {
      PureState psi = sampler.sample(static_cast<std::uint64_t>(i));
      for (Index idx = 0; idx < dk; ++idx) {
        Complex amp = 1.0;
        for (int c = 0; c < k; ++c) amp *= psi.amplitudes(digits[static_cast<size_t>(idx)][c]);
        tensor(idx) = amp;
      }
      acc.noalias() += psi.weight * (tensor * tensor.adjoint());
      wsum += psi.weight;
    }
    block_acc[static_cast<size_t>(b)] = std::move(acc);
    block_weight[static_cast<size_t>(b)] = wsum;
  };

  if (opts.exec == Exec::Serial) {
    for (int b = 0; b < nb; ++b) run_block(b);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (int b = 0; b < nb; ++b) run_block(b);
  }

  Matrix total = Matrix::Zero(dk, dk);
  double wtotal = 0.0;
  for (int b = 0; b < nb; ++b) {
    total += block_acc[static_cast<size_t>(b)];
    wtotal += block_weight[static_cast<size_t>(b)];
  }
  return total / wtotal;
}

MomentMatrices full_moment_matrices(const DensityMatrix& rho, const EnsembleSampler& sampler,
                                    int k, std::int64_t n_samples, bool with_prefactor,
                                    const McOptions& opts) {
  if (sampler.dim() != rho.dim()) {
    throw DimensionError("full_moment_matrices: sampler and rho dims differ");
  }
  return {mc_moment_matrix(sampler, k, n_samples, opts),
          approx_moment_matrix(rho, k, with_prefactor)};
}

double relative_error_psd(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw DimensionError("relative_error_psd: need equal square shapes");
  }
  const double scale_a = std::max(1e-300, a.cwiseAbs().maxCoeff());
  const double scale_b = std::max(1e-300, b.cwiseAbs().maxCoeff());
  if (!is_hermitian(a, 1e-9 * scale_a) || !is_hermitian(b, 1e-9 * scale_b)) {
    throw ValidationError("relative_error_psd: inputs must be Hermitian");
  }
  EigResult ea = eigs((a + a.adjoint()) / 2.0);
  if (ea.values(0) < -1e-9 * scale_a) {
    throw ValidationError("relative_error_psd: first argument is not PSD");
  }
  EigResult eb = eigs((b + b.adjoint()) / 2.0);
  if (eb.values(0) < -1e-9 * scale_b) {
    throw ValidationError("relative_error_psd: second argument is not PSD");
  }

  const Index d = a.rows();
  const double cut = 1e-12 * std::max(ea.values(d - 1), 0.0);
  std::vector<Index> support;
  for (Index i = 0; i < d; ++i) {
    if (ea.values(i) > cut) support.push_back(i);
  }
  if (support.empty()) throw ValidationError("relative_error_psd: first argument is zero");

  // Support containment: any weight of B outside supp(A) makes the sandwich
  // impossible.
  Matrix kernel_vecs(d, d - static_cast<Index>(support.size()));
  Index kcol = 0;
  for (Index i = 0; i < d; ++i) {
    if (ea.values(i) <= cut) kernel_vecs.col(kcol++) = ea.vectors.col(i);
  }
  if (kcol > 0) {
    double leak = (kernel_vecs.adjoint() * b * kernel_vecs).cwiseAbs().maxCoeff();
    if (leak > 1e-9 * scale_b) return std::numeric_limits<double>::infinity();
  }

  Matrix v(d, static_cast<Index>(support.size()));
  RealVector inv_sqrt(static_cast<Index>(support.size()));
  for (size_t j = 0; j < support.size(); ++j) {
    v.col(static_cast<Index>(j)) = ea.vectors.col(support[j]);
    inv_sqrt(static_cast<Index>(j)) = 1.0 / std::sqrt(ea.values(support[j]));
  }
  Matrix conj_b = inv_sqrt.asDiagonal() * (v.adjoint() * b * v) * inv_sqrt.asDiagonal();
  EigResult ec = eigs((conj_b + conj_b.adjoint()) / 2.0);
  double eps = 0.0;
  for (Index i = 0; i < ec.values.size(); ++i) {
    eps = std::max(eps, std::abs(ec.values(i) - 1.0));
  }
  return eps;
}

std::vector<Probe> computational_probe_set(const DensityMatrix& rho, int k, std::uint64_t seed,
                                           int n_probes) {
  const Index d = rho.dim();
  std::vector<Index> support_strings;
  for (Index x = 0; x < d; ++x) {
    if (rho.matrix()(x, x).real() > 1e-12) support_strings.push_back(x);
  }
  if (support_strings.empty()) {
    throw ValidationError("probe set: rho has no diagonal support");
  }
  CounterRng rng(seed, rng_stream::kProbes, 0);
  std::vector<Probe> probes;
  const int count = std::min<int>(n_probes, static_cast<int>(support_strings.size()));
  // Without replacement when few enough strings exist, else random draws.
  std::vector<Index> chosen;
  if (static_cast<int>(support_strings.size()) <= n_probes) {
    chosen = support_strings;
  } else {
    for (int i = 0; i < count; ++i) {
      chosen.push_back(
          support_strings[rng.uniform_index(support_strings.size())]);
    }
  }
  for (Index x : chosen) {
    Vector basis = Vector::Zero(d);
    basis(x) = 1.0;
    probes.push_back(Probe(static_cast<size_t>(k), basis));
  }
  return probes;
}

std::vector<Probe> default_probe_set(const DensityMatrix& rho, int k, std::uint64_t seed,
                                     int max_strings, int n_haar) {
  const Index d = rho.dim();
  std::vector<Probe> probes = computational_probe_set(rho, k, seed, max_strings);
  if (d > 256) {
    for (int i = 0; i < n_haar; ++i) {
      Probe probe;
      for (int r = 0; r < k; ++r) {
        probe.push_back(sample_haar_vector(d, seed ^ rng_stream::kProbes,
                                           static_cast<std::uint64_t>(i * k + r)));
      }
      probes.push_back(std::move(probe));
    }
  }
  return probes;
}

ErrorReport relative_error_probes(const DensityMatrix& rho, const EnsembleSampler& sampler, int k,
                                  const std::vector<Probe>& probes, std::int64_t n_samples,
                                  const McOptions& opts) {
  if (probes.empty()) throw ValidationError("relative_error_probes: empty probe set");
  const int np = static_cast<int>(probes.size());

  std::vector<Complex> approx(static_cast<size_t>(np));
  for (int p = 0; p < np; ++p) {
    approx[static_cast<size_t>(p)] = approx_moment_element(rho, probes[static_cast<size_t>(p)],
                                                           probes[static_cast<size_t>(p)], true);
  }

  // stats: [w, w^2, w f_0, ..., w f_{np-1}] (f real since bras = kets)
  BlockSums sums = mc_block_sums(
      n_samples, np + 2,
      [&](std::uint64_t i, double* out) {
        PureState psi = sampler.sample(i);
        out[0] = psi.weight;
        out[1] = psi.weight * psi.weight;
        for (int p = 0; p < np; ++p) {
          double f = 1.0;
          for (const Vector& ket : probes[static_cast<size_t>(p)]) {
            f *= std::norm(ket.dot(psi.amplitudes));
          }
          out[2 + p] = psi.weight * f;
        }
      },
      opts);

  ErrorReport report;
  report.epsilon_bound = moment_error_bound(rho, k);
  double ess = effective_sample_size(sums, 0, 1);
  for (int p = 0; p < np; ++p) {
    JackknifeEstimate est = jackknife_ratio(sums, 2 + p, 0);
    double a = approx[static_cast<size_t>(p)].real();
    ProbeDeviation dev;
    std::ostringstream desc;
    desc << "probe-" << p;
    dev.description = desc.str();
    dev.ratio = est.value / a;
    dev.sigma = est.std_error / std::abs(a);
    dev.low_quality = ess < 30.0;
    report.any_low_quality |= dev.low_quality;
    report.epsilon_measured = std::max(report.epsilon_measured, std::abs(dev.ratio - 1.0));
    report.probes.push_back(std::move(dev));
  }
  return report;
}

ErrorReport subsystem_moment_error(const DensityMatrix& rho, const EnsembleSampler& sampler, int k,
                                   const Partition& part, const std::string& keep, int n_probes,
                                   std::int64_t n_samples, std::uint64_t probe_seed,
                                   const McOptions& opts, bool identical_strings) {
  part.require_consistent_with(rho.dim());
  const auto keep_sites = part.sites_of(keep);
  std::vector<int> traced_sites;
  for (int s = 0; s < part.n_sites(); ++s) {
    if (part.region_of_site(s) != keep) traced_sites.push_back(s);
  }
  const auto keep_embed = embedding_table(part.factor_dims(), keep_sites);
  const auto trace_embed = embedding_table(part.factor_dims(), traced_sites);
  const Index da = static_cast<Index>(keep_embed.size());

  Matrix rho_a = partial_trace(rho.matrix(), part, keep);

  // Random product probes: k strings on the kept region per probe.
  CounterRng rng(probe_seed, rng_stream::kProbes, 1);
  std::vector<std::vector<Index>> probe_strings;
  std::vector<double> targets;
  for (int p = 0; p < n_probes; ++p) {
    std::vector<Index> strings(static_cast<size_t>(k));
    double target = 1.0;
    for (int r = 0; r < k; ++r) {
      if (identical_strings && r > 0) {
        strings[static_cast<size_t>(r)] = strings[0];
        target *= rho_a(strings[0], strings[0]).real();
        continue;
      }
      Index x = 0;
      double diag = 0.0;
      // Rejection: stay on the diagonal support of rho_A.
      for (int attempt = 0; attempt < 1000; ++attempt) {
        x = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(da)));
        diag = rho_a(x, x).real();
        if (diag > 1e-12) break;
      }
      strings[static_cast<size_t>(r)] = x;
      target *= diag;
    }
    probe_strings.push_back(std::move(strings));
    targets.push_back(target);
  }

  // stats: [w, w^2, w f_0, ...]; f_p = prod_r marginal(x_{p,r})
  BlockSums sums = mc_block_sums(
      n_samples, n_probes + 2,
      [&](std::uint64_t i, double* out) {
        PureState psi = sampler.sample(i);
        std::vector<double> marginal(static_cast<size_t>(da), 0.0);
        for (size_t ka = 0; ka < keep_embed.size(); ++ka) {
          double acc = 0.0;
          for (Index tb : trace_embed) acc += std::norm(psi.amplitudes(keep_embed[ka] + tb));
          marginal[ka] = acc;
        }
        out[0] = psi.weight;
        out[1] = psi.weight * psi.weight;
        for (int p = 0; p < n_probes; ++p) {
          double f = 1.0;
          for (Index x : probe_strings[static_cast<size_t>(p)]) {
            f *= marginal[static_cast<size_t>(x)];
          }
          out[2 + p] = psi.weight * f;
        }
      },
      opts);

  ErrorReport report;
  double s_star =
      post_measurement_min_entropy_auto(rho, part, keep).bits;  // S*_inf over traced region
  report.epsilon_bound = static_cast<double>(k) * k * std::exp2(-s_star);
  double ess = effective_sample_size(sums, 0, 1);
  for (int p = 0; p < n_probes; ++p) {
    JackknifeEstimate est = jackknife_ratio(sums, 2 + p, 0);
    ProbeDeviation dev;
    std::ostringstream desc;
    desc << "strings";
    for (Index x : probe_strings[static_cast<size_t>(p)]) desc << "-" << x;
    dev.description = desc.str();
    dev.ratio = est.value / targets[static_cast<size_t>(p)];
    dev.sigma = est.std_error / targets[static_cast<size_t>(p)];
    dev.low_quality = ess < 30.0;
    report.any_low_quality |= dev.low_quality;
    report.epsilon_measured = std::max(report.epsilon_measured, std::abs(dev.ratio - 1.0));
    report.probes.push_back(std::move(dev));
  }
  return report;
}

}  // namespace scrooge
