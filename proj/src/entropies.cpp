#include "scrooge/entropies.hpp"

#include "scrooge/linalg.hpp"
#include "scrooge/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scrooge {

double min_entropy(const DensityMatrix& rho) {
  return std::max(0.0, -std::log2(rho.max_eigenvalue()));
}

double renyi_entropy(const DensityMatrix& rho, double alpha) {
  if (alpha <= 0) throw ValidationError("renyi_entropy: alpha must be > 0");
  auto spectrum = rho.spectrum();
  if (alpha == 1.0) {
    double h = 0.0;
    for (double lam : spectrum) {
      if (lam > 0) h -= lam * std::log2(lam);
    }
    return h;
  }
  double z = 0.0;
  for (double lam : spectrum) {
    if (lam > 0) z += std::pow(lam, alpha);
  }
  return std::log2(z) / (1.0 - alpha);
}

namespace {

// Embed an operator acting on `region` as op (x) identity on the rest,
// respecting interleaved site order.
Matrix embed_on_region(const Matrix& op, const Partition& part, const std::string& region) {
  const auto region_sites = part.sites_of(region);
  std::vector<int> rest_sites;
  for (int s = 0; s < part.n_sites(); ++s) {
    if (part.region_of_site(s) != region) rest_sites.push_back(s);
  }
  const auto region_embed = embedding_table(part.factor_dims(), region_sites);
  const auto rest_embed = embedding_table(part.factor_dims(), rest_sites);
  Matrix out = Matrix::Zero(part.total_dim(), part.total_dim());
  for (size_t ar = 0; ar < region_embed.size(); ++ar) {
    for (size_t ac = 0; ac < region_embed.size(); ++ac) {
      Complex v = op(static_cast<Index>(ar), static_cast<Index>(ac));
      if (v == Complex(0.0, 0.0)) continue;
      for (Index b : rest_embed) out(region_embed[ar] + b, region_embed[ac] + b) = v;
    }
  }
  return out;
}

}  // namespace

double conditional_hat_entropy(const DensityMatrix& rho_ab, const Partition& part,
                               const std::string& a_label, const std::string& b_label) {
  part.require_consistent_with(rho_ab.dim());
  Matrix rho_a = partial_trace(rho_ab.matrix(), part, a_label);
  Matrix pinv = pinv_sqrt(DensityMatrix(rho_a, {rho_a.rows()}));
  Matrix embedded = embed_on_region(pinv, part, a_label);
  Matrix transposed = partial_transpose(rho_ab.matrix(), part, b_label);
  double norm = spectral_norm(embedded * transposed * embedded);
  double bits = -std::log2(norm);
  if (bits < -1e-6) {
    std::ostringstream msg;
    msg << "conditional_hat_entropy: value " << bits << " below the clamping tolerance";
    throw std::runtime_error(msg.str());
  }
  return std::max(0.0, bits);
}

namespace {

struct ConditionalProblem {
  // rho entries regrouped as rho[(a', b), (a, b')] lookups via embeddings
  const Matrix* rho;
  std::vector<Index> a_embed;
  std::vector<Index> b_embed;
  Matrix support_basis;   // columns: orthonormal basis of supp(rho_A), in A coords
  Matrix m_support;       // V^dag rho_A V
  Index da, db, ra;
};

// Unnormalized conditional operator N(y)[b,b'] = sum_{a',a} conj(y_a') y_a
// rho[(a',b),(a,b')], for y given in A coordinates.
Matrix conditional_operator(const ConditionalProblem& prob, const Vector& y) {
  Matrix n = Matrix::Zero(prob.db, prob.db);
  for (Index ap = 0; ap < prob.da; ++ap) {
    if (std::norm(y(ap)) < 1e-300) continue;
    for (Index a = 0; a < prob.da; ++a) {
      Complex coeff = std::conj(y(ap)) * y(a);
      if (std::norm(coeff) < 1e-300) continue;
      for (Index b = 0; b < prob.db; ++b) {
        for (Index bp = 0; bp < prob.db; ++bp) {
          n(b, bp) += coeff * (*prob.rho)(prob.a_embed[static_cast<size_t>(ap)] +
                                              prob.b_embed[static_cast<size_t>(b)],
                                          prob.a_embed[static_cast<size_t>(a)] +
                                              prob.b_embed[static_cast<size_t>(bp)]);
        }
      }
    }
  }
  return n;
}

// G_u[a',a] = sum_{b,b'} conj(u_b) u_b' rho[(a',b),(a,b')]  (Hermitian PSD).
Matrix overlap_operator(const ConditionalProblem& prob, const Vector& u) {
  Matrix g = Matrix::Zero(prob.da, prob.da);
  for (Index ap = 0; ap < prob.da; ++ap) {
    for (Index a = 0; a < prob.da; ++a) {
      Complex acc = 0.0;
      for (Index b = 0; b < prob.db; ++b) {
        if (std::norm(u(b)) < 1e-300) continue;
        for (Index bp = 0; bp < prob.db; ++bp) {
          acc += std::conj(u(b)) * u(bp) *
                 (*prob.rho)(prob.a_embed[static_cast<size_t>(ap)] +
                                 prob.b_embed[static_cast<size_t>(b)],
                             prob.a_embed[static_cast<size_t>(a)] +
                                 prob.b_embed[static_cast<size_t>(bp)]);
        }
      }
      g(ap, a) = acc;
    }
  }
  return g;
}

struct Candidate {
  double objective = 0.0;  // ||rho^B_y||_inf
  Vector y;                // in A coordinates (unit, in supp rho_A)
  bool converged = false;
};

// Ascent from one start: alternate exact linearized steps (top generalized
// eigenvector of (G_u, M)) with projected-gradient backtracking.
Candidate ascend(const ConditionalProblem& prob, Vector a_coords, const OptimizerOptions& opts) {
  const Matrix& v = prob.support_basis;
  auto objective_and_top = [&](const Vector& a) {
    Vector y = v * a;
    Matrix n = conditional_operator(prob, y);
    double q = std::real(a.dot(prob.m_support * a));
    EigResult e = eigs((n + n.adjoint()) / 2.0);
    return std::tuple<double, Vector, double>(e.values(prob.db - 1) / q,
                                              e.vectors.col(prob.db - 1), q);
  };

  a_coords.normalize();
  auto [f, u, q] = objective_and_top(a_coords);
  bool converged = false;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    Matrix g_full = overlap_operator(prob, u);
    Matrix g = v.adjoint() * g_full * v;

    // Linearized exact step: maximize (a^dag G a)/(a^dag M a).
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> gen((g + g.adjoint()) / 2.0,
                                                         prob.m_support);
    Vector a_lin = gen.eigenvectors().col(prob.ra - 1).normalized();
    auto [f_lin, u_lin, q_lin] = objective_and_top(a_lin);

    if (f_lin > f + opts.tol * std::abs(f)) {
      a_coords = a_lin;
      f = f_lin;
      u = u_lin;
      q = q_lin;
      continue;
    }

    // Projected gradient with backtracking as a fallback.
    Vector grad = (g * a_coords) * q - Complex(std::real(a_coords.dot(g * a_coords)), 0.0) *
                                           (prob.m_support * a_coords);
    grad /= q * q;
    grad -= a_coords * a_coords.dot(grad);
    double gnorm = grad.norm();
    if (gnorm < 1e-14) {
      converged = true;
      break;
    }
    double step = 1.0 / std::max(1.0, gnorm);
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt) {
      Vector trial = (a_coords + step * grad).normalized();
      auto [f_t, u_t, q_t] = objective_and_top(trial);
      if (f_t > f + opts.tol * std::abs(f)) {
        a_coords = trial;
        f = f_t;
        u = u_t;
        q = q_t;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      converged = true;
      break;
    }
  }
  Candidate c;
  c.objective = f;
  c.y = v * a_coords;
  c.converged = converged;
  return c;
}

}  // namespace

PostMeasurementResult post_measurement_min_entropy(const DensityMatrix& rho_ab,
                                                   const Partition& part,
                                                   const std::string& a_label,
                                                   const std::string& b_label,
                                                   const OptimizerOptions& opts) {
  part.require_consistent_with(rho_ab.dim());
  const Index da = part.region_dim(a_label);
  const Index db = part.region_dim(b_label);
  if (da > 64) {
    throw ValidationError("post_measurement_min_entropy: dim(A) > 64 unsupported in "
                          "optimization mode");
  }

  ConditionalProblem prob;
  prob.rho = &rho_ab.matrix();
  prob.a_embed = embedding_table(part.factor_dims(), part.sites_of(a_label));
  std::vector<int> b_sites;
  for (int s = 0; s < part.n_sites(); ++s) {
    if (part.region_of_site(s) != a_label) b_sites.push_back(s);
  }
  prob.b_embed = embedding_table(part.factor_dims(), b_sites);
  prob.da = da;
  prob.db = static_cast<Index>(prob.b_embed.size());
  if (prob.db != db) {
    // b_label must cover the complement of A
    throw ValidationError("post_measurement_min_entropy: regions A and B must cover all sites");
  }

  Matrix rho_a = partial_trace(rho_ab.matrix(), part, a_label);
  EigResult ea = eigs(rho_a);
  double cut = 1e-12 * std::max(ea.values(da - 1), 0.0);
  std::vector<Index> support;
  for (Index i = 0; i < da; ++i) {
    if (ea.values(i) > cut) support.push_back(i);
  }
  prob.ra = static_cast<Index>(support.size());
  prob.support_basis = Matrix(da, prob.ra);
  for (Index j = 0; j < prob.ra; ++j) {
    prob.support_basis.col(j) = ea.vectors.col(support[static_cast<size_t>(j)]);
  }
  prob.m_support = prob.support_basis.adjoint() * rho_a * prob.support_basis;

  // Deterministic starts: support eigenvector directions and computational
  // basis states (covers the product and classical cases exactly), plus Haar
  // restarts.
  std::vector<Vector> starts;
  for (Index j = 0; j < prob.ra; ++j) starts.push_back(Vector::Unit(prob.ra, j));
  for (Index x = 0; x < da; ++x) {
    Vector basis = Vector::Zero(da);
    basis(x) = 1.0;
    Vector a_coords = prob.support_basis.adjoint() * basis;
    if (a_coords.norm() > 1e-8) starts.push_back(a_coords.normalized());
  }
  for (int rstart = 0; rstart < opts.restarts; ++rstart) {
    CounterRng rng(opts.seed, rng_stream::kOptimizer, static_cast<std::uint64_t>(rstart));
    Vector a_coords(prob.ra);
    for (Index i = 0; i < prob.ra; ++i) a_coords(i) = rng.complex_normal();
    starts.push_back(a_coords.normalized());
  }

  // Restarts are independent; reduce in start order so the result does not
  // depend on thread scheduling.
  std::vector<Candidate> candidates(starts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int s = 0; s < static_cast<int>(starts.size()); ++s) {
    candidates[static_cast<size_t>(s)] = ascend(prob, starts[static_cast<size_t>(s)], opts);
  }
  Candidate best;
  bool all_converged = true;
  for (const Candidate& c : candidates) {
    if (c.objective > best.objective) best = c;
    all_converged = all_converged && c.converged;
  }

  PostMeasurementResult result;
  result.bits = std::max(0.0, -std::log2(best.objective));
  result.converged = all_converged;
  result.restarts = static_cast<int>(starts.size());
  result.best_objective = best.objective;
  result.best_y = best.y;
  result.exact = false;
  return result;
}

PostMeasurementResult post_measurement_min_entropy_auto(const DensityMatrix& rho,
                                                        const Partition& part,
                                                        const std::string& measured,
                                                        const OptimizerOptions& opts) {
  part.require_consistent_with(rho.dim());
  // Rebuild a two-region view: measured sites -> A, the rest -> B.
  std::vector<std::string> labels(static_cast<size_t>(part.n_sites()));
  for (int s = 0; s < part.n_sites(); ++s) {
    labels[static_cast<size_t>(s)] = part.region_of_site(s) == measured ? "A" : "B";
  }
  Partition two(part.factor_dims(), labels);

  Matrix rho_a = partial_trace(rho.matrix(), two, "A");
  Matrix rho_b = partial_trace(rho.matrix(), two, "B");

  // Product shortcut: if rho = rho_A (x) rho_B the conditional state never
  // depends on the outcome and S*_inf(B) = S_inf(rho_B).
  const auto a_embed = embedding_table(two.factor_dims(), two.sites_of("A"));
  const auto b_embed = embedding_table(two.factor_dims(), two.sites_of("B"));
  double max_diff = 0.0;
  for (size_t ar = 0; ar < a_embed.size() && max_diff <= 1e-10; ++ar) {
    for (size_t ac = 0; ac < a_embed.size(); ++ac) {
      for (size_t br = 0; br < b_embed.size(); ++br) {
        for (size_t bc = 0; bc < b_embed.size(); ++bc) {
          Complex expect = rho_a(static_cast<Index>(ar), static_cast<Index>(ac)) *
                           rho_b(static_cast<Index>(br), static_cast<Index>(bc));
          double diff = std::abs(rho.matrix()(a_embed[ar] + b_embed[br], a_embed[ac] + b_embed[bc]) -
                                 expect);
          max_diff = std::max(max_diff, diff);
        }
      }
      if (max_diff > 1e-10) break;
    }
  }
  if (max_diff <= 1e-10) {
    EigResult eb = eigs(rho_b);
    PostMeasurementResult result;
    result.best_objective = eb.values(static_cast<Index>(b_embed.size()) - 1);
    result.bits = std::max(0.0, -std::log2(result.best_objective));
    result.converged = true;
    result.exact = true;
    return result;
  }
  return post_measurement_min_entropy(rho, two, "A", "B", opts);
}

// --- subentropy --------------------------------------------------------------

double expected_r_ln_r(std::span<const double> eigenvalues) {
  std::vector<double> lams;
  for (double lam : eigenvalues) {
    if (lam > 1e-14) lams.push_back(lam);
  }
  if (lams.empty()) throw ValidationError("expected_r_ln_r: empty spectrum");
  double purity = 0.0;
  for (double lam : lams) purity += lam * lam;

  // E[r ln r] = int_0^inf dt/t [e^{-t} - L(t) S(t)] with
  // L = prod_i (1 + lam_i t)^{-1}, S = sum_i lam_i/(1 + lam_i t);
  // the integrand extends continuously to tr(rho^2) at t = 0.
  auto integrand = [&lams, purity](double t) {
    if (t < 1e-280) return purity;
    double log_l = 0.0;
    double s = 0.0;
    for (double lam : lams) {
      log_l -= std::log1p(lam * t);
      s += lam / (1.0 + lam * t);
    }
    return (std::exp(-t) - std::exp(log_l) * s) / t;
  };
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(integrand, 0.0,
                                              std::numeric_limits<double>::infinity(), 15, 1e-12);
}

double subentropy_of_spectrum(std::span<const double> eigenvalues) {
  double q = ((1.0 - kEulerMascheroni) - expected_r_ln_r(eigenvalues)) / kLn2;
  if (q < -1e-6 || q > kSubentropyMaxBits + 1e-6) {
    std::ostringstream msg;
    msg << "subentropy: value " << q << " escaped [0, " << kSubentropyMaxBits << "]";
    throw std::runtime_error(msg.str());
  }
  return std::clamp(q, 0.0, kSubentropyMaxBits);
}

double subentropy(const DensityMatrix& rho) {
  auto spectrum = rho.spectrum();
  return subentropy_of_spectrum(spectrum);
}

double subentropy_product_formula(std::span<const double> eigenvalues) {
  std::vector<double> lams;
  for (double lam : eigenvalues) {
    if (lam > 1e-14) lams.push_back(lam);
  }
  long double q = 0.0L;
  for (size_t k = 0; k < lams.size(); ++k) {
    long double prod = 1.0L;
    for (size_t l = 0; l < lams.size(); ++l) {
      if (l != k) prod *= static_cast<long double>(lams[k]) / (lams[k] - lams[l]);
    }
    q -= prod * static_cast<long double>(lams[k]) *
         std::log2(static_cast<long double>(lams[k]));
  }
  return static_cast<double>(q);
}

MomentEstimate subentropy_gaussian_check(const DensityMatrix& rho, std::int64_t n_samples,
                                         std::uint64_t seed, const McOptions& opts) {
  if (n_samples < 10000) {
    throw ValidationError("subentropy_gaussian_check: need at least 1e4 samples");
  }
  auto spectrum = rho.spectrum();
  const Index d = rho.dim();
  BlockSums sums = mc_block_sums(
      n_samples, 2,
      [&](std::uint64_t i, double* out) {
        CounterRng rng(seed, rng_stream::kSampler, i);
        double r = 0.0;
        for (Index j = 0; j < d; ++j) {
          double re = rng.normal(), im = rng.normal();
          r += spectrum[static_cast<size_t>(j)] * 0.5 * (re * re + im * im);
        }
        double v = r > 0 ? r * std::log2(r) : 0.0;
        out[0] = v;
        out[1] = 1.0;
      },
      opts);
  JackknifeEstimate est = jackknife_ratio(sums, 0, 1);
  MomentEstimate out;
  out.value = est.value;
  out.std_error = est.std_error;
  out.n_samples = n_samples;
  out.effective_samples = static_cast<double>(n_samples);
  out.weighted = false;
  return out;
}

EntropyReport build_entropy_report(const DensityMatrix& rho, const Partition& part,
                                   const std::string& a_label, const std::string& b_label,
                                   const OptimizerOptions& opts) {
  EntropyReport report;
  report.s_inf = min_entropy(rho);
  for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
    report.s_alpha[alpha] = renyi_entropy(rho, alpha);
  }
  report.s_hat_b_given_a = conditional_hat_entropy(rho, part, a_label, b_label);
  PostMeasurementResult star = post_measurement_min_entropy_auto(rho, part, a_label, opts);
  report.s_star_b = star.bits;
  report.s_star_exact = star.exact;
  report.s_star_restarts = star.restarts;
  report.subentropy_bits = subentropy(rho);
  return report;
}

}  // namespace scrooge
