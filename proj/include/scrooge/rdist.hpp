#pragma once

#include "scrooge/parallel.hpp"
#include "scrooge/types.hpp"
#include "scrooge/verdict.hpp"

#include <functional>
#include <span>
#include <vector>

namespace scrooge {

// N draws of the Haar weight r_phi = d <phi|rho|phi>; depends on rho only
// through its spectrum.
std::vector<double> sample_r(const DensityMatrix& rho, std::int64_t n_samples,
                             std::uint64_t seed, const McOptions& opts = {});

// f(x, order): the function (order 0) and its derivatives, available up to
// max_order. Needed wherever knots coincide.
struct SmoothFn {
  std::function<double(double, int)> eval;
  int max_order = 0;
};

SmoothFn exp_fn(double s);  // t -> exp(s t), any order

// Newton divided difference f[x_1, ..., x_n] with the confluent rule
// f[x,...,x] (k+1 copies) = f^(k)(x)/k! applied inside clusters of width
// below confluence_tol * scale. Permutation invariant (knots are sorted).
double divided_difference(const SmoothFn& f, std::span<const double> knots,
                          double confluence_tol = 1e-9);

// E_phi[f^{(d-1)}(r_phi)] vs (d-1)! f[mu_1, ..., mu_d] for f = exp(s t);
// 4-sigma two-sided verdict.
VerdictRecord moment_identity_check(const DensityMatrix& rho, double s, std::int64_t n_samples,
                                    std::uint64_t seed, const McOptions& opts = {});

// Beta(m, d-m) reference for the rescaled weight u = (m/d) r of a flat
// rank-m background.
class BetaReference {
 public:
  BetaReference(int m, int d);
  double pdf(double u) const;
  double cdf(double u) const;
  double mean() const { return static_cast<double>(m_) / d_; }
  int m() const { return m_; }
  int d() const { return d_; }

 private:
  int m_, d_;
  double log_beta_;
};

// Kolmogorov-Smirnov distance between samples and a reference cdf.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
// Critical value c(alpha)/sqrt(n) for the one-sample KS test.
double ks_critical_value(double alpha, std::int64_t n);

// Raw, reciprocal and central moment bounds on r_phi, each with 3-sigma
// one-sided slack. Requires floor(1/max eig) >= 8.
std::vector<VerdictRecord> moment_bounds_check(const DensityMatrix& rho, std::int64_t n_samples,
                                               std::uint64_t seed, const McOptions& opts = {});

// Density of r on the given grid: divided difference over the knots
// mu_i = d lambda_i of the truncated power kernel (t - r)_+^{d-2}, normalized
// numerically to unit mass on the grid. Requires d <= 12.
std::vector<double> spline_pdf(const DensityMatrix& rho, std::span<const double> r_grid);

}  // namespace scrooge
