#pragma once

#include "scrooge/ensembles.hpp"
#include "scrooge/linalg.hpp"
#include "scrooge/parallel.hpp"
#include "scrooge/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scrooge {

struct MomentEstimate {
  Complex value{0.0, 0.0};
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  double effective_samples = 0.0;
  bool weighted = false;
  bool low_quality = false;  // effective sample size < 30
};

// d^k / d^(k) with the rising factorial d^(k) = d (d+1) ... (d+k-1).
double haar_prefactor(Index d, int k);

// Theorem error bound delta_{rho,k} with the documented constant 11:
// 11 k^2 / sqrt(m), m = floor(2^{S_inf}). Zero for k <= 1 (first moments are
// exact).
double moment_error_bound(double s_inf_bits, int k);
double moment_error_bound(const DensityMatrix& rho, int k);

// Sum over all k! permutations of the cycle products, optionally times the
// exact prefactor d^k/d^(k).
Complex approx_moment_element(const DensityMatrix& rho, std::span<const Vector> bras,
                              std::span<const Vector> kets, bool with_prefactor = true);

// Weighted empirical mean of prod_r <bra_r|psi><psi|ket_r> with jackknife
// error; self-normalized importance weighting for weighted samplers.
MomentEstimate mc_moment_element(const EnsembleSampler& sampler, std::span<const Vector> bras,
                                 std::span<const Vector> kets, std::int64_t n_samples,
                                 const McOptions& opts = {});

// rho^(x k) * sum_pi pi as a dense d^k x d^k matrix (d^k <= 4096).
Matrix approx_moment_matrix(const DensityMatrix& rho, int k, bool with_prefactor = true);

// Empirical mean of |psi><psi|^(x k) (self-normalized when weighted).
Matrix mc_moment_matrix(const EnsembleSampler& sampler, int k, std::int64_t n_samples,
                        const McOptions& opts = {});

struct MomentMatrices {
  Matrix mc;
  Matrix approx;
};
MomentMatrices full_moment_matrices(const DensityMatrix& rho, const EnsembleSampler& sampler,
                                    int k, std::int64_t n_samples, bool with_prefactor = true,
                                    const McOptions& opts = {});

// Smallest eps with (1-eps) A <= B <= (1+eps) A; infinity when the support of
// B is not contained in the support of A.
double relative_error_psd(const Matrix& a, const Matrix& b);

struct ProbeDeviation {
  std::string description;
  double ratio = 0.0;      // mc / approx
  double sigma = 0.0;      // std error of the ratio
  bool low_quality = false;
};

struct ErrorReport {
  double epsilon_measured = 0.0;  // max |ratio - 1| over probes
  double epsilon_bound = 0.0;
  std::vector<ProbeDeviation> probes;
  bool any_low_quality = false;
};

// One probe = k ket vectors (bras are taken equal to kets).
using Probe = std::vector<Vector>;

// Default probe set: every computational string x as |x>^k when d <= 256,
// otherwise 256 random strings plus 64 Haar product probes. Strings outside
// the support of rho (p_rho(x) ~ 0) are skipped.
std::vector<Probe> default_probe_set(const DensityMatrix& rho, int k, std::uint64_t seed,
                                     int max_strings = 256, int n_haar = 64);
std::vector<Probe> computational_probe_set(const DensityMatrix& rho, int k, std::uint64_t seed,
                                           int n_probes);

ErrorReport relative_error_probes(const DensityMatrix& rho, const EnsembleSampler& sampler, int k,
                                  const std::vector<Probe>& probes, std::int64_t n_samples,
                                  const McOptions& opts = {});

// Product-probe subsystem collapse check: weighted MC estimate of
// E prod_r <x_r| tr_B psi |x_r> against prod_r <x_r| tr_B rho |x_r> for
// random strings x_r on region `keep`; bound k^2 2^{-S*_inf(B)}. With
// identical_strings the k strings of each probe coincide (the moments of a
// single marginal probability).
ErrorReport subsystem_moment_error(const DensityMatrix& rho, const EnsembleSampler& sampler, int k,
                                   const Partition& part, const std::string& keep, int n_probes,
                                   std::int64_t n_samples, std::uint64_t probe_seed,
                                   const McOptions& opts = {}, bool identical_strings = false);

}  // namespace scrooge
