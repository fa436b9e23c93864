#pragma once

#include "scrooge/ensembles.hpp"
#include "scrooge/moments.hpp"
#include "scrooge/types.hpp"

#include <string>

namespace scrooge {

// Computational-basis output distribution of a state or background operator.
struct OutputDistribution {
  std::vector<Index> factor_dims;
  RealVector probs;

  Index dim() const { return probs.size(); }
};

OutputDistribution output_distribution(const PureState& psi, std::vector<Index> factor_dims = {});
OutputDistribution output_distribution(const DensityMatrix& rho);

OutputDistribution marginal(const OutputDistribution& dist, const Partition& part,
                            const std::string& keep);

// Total variation distance in the convention sum_x |p - q| (range [0, 2]).
double tvd(const OutputDistribution& p, const OutputDistribution& q);

// E p^psi(x)^k / (k! p_rho(x)^k) with jackknife error. The expected value is
// 1 up to the moment-formula error; the Haar background gives d^k/d^(k)
// exactly.
MomentEstimate pt_moment_ratio(const EnsembleSampler& sampler, const DensityMatrix& rho, Index x,
                               int k, std::int64_t n_samples, const McOptions& opts = {});

struct CoherenceParam {
  Complex r;
  double magnitude() const { return std::abs(r); }
};

// r = <x|rho|x'> / sqrt(p_rho(x) p_rho(x')); |r| <= 1.
CoherenceParam coherence_r(const DensityMatrix& rho, Index x, Index xp);

// Joint moment of the re-scaled 2x2 complex Wishart law:
// E[|p_{x,x'}|^{2a} p(x)^b p(x')^c]
//   = p^(b+a) p'^(c+a) (b+a)! (c+a)! sum_l C(b+a,l) C(c+a,l) |r|^(2l).
double wishart_joint_moment_closed(const DensityMatrix& rho, Index x, Index xp, int a, int b,
                                   int c);

// Monte Carlo moment E[|<x|psi><psi|x'>|^{2a} p(x)^b p(x')^c] of the
// sqrt(d rho)-deformed (unnormalized) ensemble, which the closed form above
// describes exactly; estimated with Haar weight w = r_phi^k (k = 2a+b+c) and
// reported with the d^k/d^(k) prefactor removed.
MomentEstimate wishart_joint_moment_mc(const EnsembleSampler& sampler, Index x, Index xp, int a,
                                       int b, int c, std::int64_t n_samples,
                                       const McOptions& opts = {});

double collision_probability(const OutputDistribution& dist);

// E sum_i sum_x p(x) p(x_i-flipped): the O(gamma) coefficient of the noisy
// collision probability.
MomentEstimate noise_sensitivity(const EnsembleSampler& sampler, std::int64_t n_samples,
                                 const McOptions& opts = {});

// Per-qubit depolarizing channel sigma -> (1-gamma) sigma + gamma tr_i(sigma) (x) I/2.
DensityMatrix apply_depolarizing(const DensityMatrix& rho, double gamma);
DensityMatrix apply_depolarizing(const PureState& psi, double gamma,
                                 std::vector<Index> factor_dims = {});

// Same channel restricted to the diagonal: independent bit flips with
// probability gamma/2 on the outcome distribution.
OutputDistribution apply_depolarizing(const OutputDistribution& dist, double gamma);

// Conditional mutual information I(X_A : X_C | X_B) in bits, from exact
// marginals; clamped at 0.
double cmi(const OutputDistribution& dist, const Partition& part, const std::string& a_label = "A",
           const std::string& b_label = "B", const std::string& c_label = "C");

// Monte Carlo average CMI over Scrooge samples for a product background
// rho_A (x) rho_B (x) rho_C; target Q(rho_A) + Q(rho_C) - Q(rho_AC).
MomentEstimate avg_cmi_scrooge(const DensityMatrix& rho, const Partition& part,
                               std::int64_t n_samples, std::uint64_t seed,
                               const McOptions& opts = {});

// Exact subentropy combination the theorem predicts for the average CMI.
double quantized_cmi_target(const DensityMatrix& rho, const Partition& part);

}  // namespace scrooge
