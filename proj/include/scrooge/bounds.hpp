#pragma once

#include "scrooge/ensembles.hpp"
#include "scrooge/parallel.hpp"
#include "scrooge/types.hpp"
#include "scrooge/verdict.hpp"

#include <optional>
#include <span>

namespace scrooge {

struct BoundInputs {
  double s_inf = 0.0;      // bits
  int k = 1;
  double epsilon = 0.0;    // additive error, in [0, 2]
  double eta = 1.0;        // failure probability, in (0, 1]
  int n_qubits = 1;
  double h_norm = 0.0;     // Hamiltonian operator norm (defaults to n_qubits)
  // Overrides the default moment-formula error 11 k^2 2^{-S_inf/2} (zero for
  // k <= 1); the arithmetic examples pin delta ~ 0.
  std::optional<double> delta_override;

  double delta() const;
};

struct BitsBound {
  bool vacuous = false;
  double bits = 0.0;
};

// m_bits >= k (S_inf - log2 k) - log2(1 - eps - 2 delta); vacuous when the
// log argument is not positive.
BitsBound bits_lower_bound(const BoundInputs& in);

// T >= 2^{k S_inf} / k! * (1 - eps/2)^2 / ||H|| with constant 1.
double temporal_time_bound(const BoundInputs& in);

struct ComplexityBound {
  double basic = 0.0;    // k (S_inf - log2 k) / log2(k S_inf)
  double refined = 0.0;  // (k (S_inf - log2 k) - log2 eta) / log2(k S_inf)
};
ComplexityBound complexity_bound(const BoundInputs& in);

// Discrete-ensemble cardinality lemma: a uniform ensemble of r exact Scrooge
// samples has additive moment error eps_meas = ||chi_discrete - chi_appr||_1,
// and the lemma requires r >= (1 - delta - eps_meas/2) 2^{k S_inf} / k!.
struct CardinalityCheck {
  double eps_meas = 0.0;
  double required = 0.0;  // right-hand side of the lemma
  int r_states = 0;
  VerdictRecord verdict;
};
CardinalityCheck cardinality_check(const DensityMatrix& rho, int k, int r_states,
                                   std::uint64_t seed, const McOptions& opts = {});

// Time-averaged first moment of the temporal ensemble, in closed form via
// eigenbasis dephasing: off-diagonal (i,j) entries pick up
// (1 - e^{-i (E_i - E_j) T}) / (i (E_i - E_j) T).
DensityMatrix temporal_first_moment(const Hamiltonian& h, const Vector& psi0, double horizon);

struct TemporalSweepPoint {
  double horizon = 0.0;
  double additive_error = 0.0;  // ||chi_mc - chi_appr(rho_T)||_1
};
std::vector<TemporalSweepPoint> temporal_additive_error_sweep(const Hamiltonian& h,
                                                              const Vector& psi0, int k,
                                                              std::span<const double> horizons,
                                                              std::int64_t n_samples,
                                                              std::uint64_t seed,
                                                              const McOptions& opts = {});

}  // namespace scrooge
