#pragma once

#include "scrooge/moments.hpp"
#include "scrooge/parallel.hpp"
#include "scrooge/types.hpp"

#include <map>
#include <span>
#include <string>

namespace scrooge {

inline constexpr double kEulerMascheroni = 0.57721566490153286060651209008240;
inline constexpr double kLn2 = 0.69314718055994530941723212145818;
// Upper bound (1 - gamma)/ln 2 on the subentropy, in bits.
inline constexpr double kSubentropyMaxBits = (1.0 - kEulerMascheroni) / kLn2;

// -log2 of the largest eigenvalue, clamped to >= 0.
double min_entropy(const DensityMatrix& rho);

// (1-alpha)^{-1} log2 tr rho^alpha; alpha = 1 returns the von Neumann entropy.
double renyi_entropy(const DensityMatrix& rho, double alpha);

// -log2 || (rho_A)^{-1/2} (rho_AB)^{T_B} (rho_A)^{-1/2} ||_inf with the
// support-restricted inverse; clamped at 0.
double conditional_hat_entropy(const DensityMatrix& rho_ab, const Partition& part,
                               const std::string& a_label = "A",
                               const std::string& b_label = "B");

struct OptimizerOptions {
  int restarts = 64;
  int max_iters = 300;
  double tol = 1e-12;
  std::uint64_t seed = 17;
};

struct PostMeasurementResult {
  double bits = 0.0;
  bool converged = true;
  int restarts = 0;
  double best_objective = 0.0;  // max_y ||rho^B_y||_inf
  Vector best_y;                // optimal measurement direction on A
  bool exact = false;           // true when the product shortcut applied
};

// S*_inf(B): minimum over unit |y> in supp(rho_A) of -log2 ||rho^B_y||_inf,
// by multistart ascent of the conditional spectral norm. Requires
// dim(A) <= 64.
PostMeasurementResult post_measurement_min_entropy(const DensityMatrix& rho_ab,
                                                   const Partition& part,
                                                   const std::string& a_label = "A",
                                                   const std::string& b_label = "B",
                                                   const OptimizerOptions& opts = {});

// Product states short-circuit to S_inf(rho_B) exactly; everything else goes
// through the optimizer. `measured` names the region the rank-1 measurement
// acts on; the entropy is evaluated on its complement.
PostMeasurementResult post_measurement_min_entropy_auto(const DensityMatrix& rho,
                                                        const Partition& part,
                                                        const std::string& measured,
                                                        const OptimizerOptions& opts = {});

// Subentropy Q in bits, clamped to [0, (1-gamma)/ln 2]. Evaluated through the
// Gaussian-weight integral representation, which is stable for degenerate and
// clustered spectra alike.
double subentropy(const DensityMatrix& rho);
double subentropy_of_spectrum(std::span<const double> eigenvalues);

// Direct eigenvalue product formula
// Q = -sum_k (prod_{l != k} lam_k/(lam_k - lam_l)) lam_k log2 lam_k.
// Requires well-separated nonzero eigenvalues; kept as the convention
// reference and cross-checked against the integral form in tests.
double subentropy_product_formula(std::span<const double> eigenvalues);

// E_z[r_z ln r_z] over standard complex Gaussian vectors z, in nats;
// equals (1 - gamma) - Q ln 2.
double expected_r_ln_r(std::span<const double> eigenvalues);

// Monte Carlo estimate of E_z[r_z log2 r_z]; its identity target is
// (1 - gamma)/ln 2 - Q(rho).
MomentEstimate subentropy_gaussian_check(const DensityMatrix& rho, std::int64_t n_samples,
                                         std::uint64_t seed, const McOptions& opts = {});

struct EntropyReport {
  double s_inf = 0.0;
  std::map<double, double> s_alpha;
  double s_hat_b_given_a = 0.0;
  double s_star_b = 0.0;
  bool s_star_exact = false;
  int s_star_restarts = 0;
  double subentropy_bits = 0.0;
};

EntropyReport build_entropy_report(const DensityMatrix& rho, const Partition& part,
                                   const std::string& a_label = "A",
                                   const std::string& b_label = "B",
                                   const OptimizerOptions& opts = {});

}  // namespace scrooge
