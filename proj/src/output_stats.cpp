#include "scrooge/output_stats.hpp"

#include "scrooge/entropies.hpp"
#include "scrooge/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scrooge {

namespace {

void clamp_and_check(RealVector& probs) {
  double sum = 0.0;
  for (Index i = 0; i < probs.size(); ++i) {
    if (probs(i) < -1e-12) {
      std::ostringstream msg;
      msg << "output distribution: entry " << i << " is " << probs(i);
      throw ValidationError(msg.str());
    }
    probs(i) = std::max(probs(i), 0.0);
    sum += probs(i);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "output distribution: total mass " << sum;
    throw ValidationError(msg.str());
  }
  probs /= sum;
}

std::vector<Index> qubit_dims(Index d) {
  std::vector<Index> dims;
  Index rem = d;
  while (rem > 1) {
    if (rem % 2 != 0) return {d};
    dims.push_back(2);
    rem /= 2;
  }
  if (dims.empty()) dims.push_back(1);
  return dims;
}

}  // namespace

OutputDistribution output_distribution(const PureState& psi, std::vector<Index> factor_dims) {
  if (psi.dim() > kMaxVectorDim) throw DimensionError("output_distribution: vector too large");
  OutputDistribution dist;
  dist.factor_dims = factor_dims.empty() ? qubit_dims(psi.dim()) : std::move(factor_dims);
  dist.probs = psi.amplitudes.cwiseAbs2();
  clamp_and_check(dist.probs);
  return dist;
}

OutputDistribution output_distribution(const DensityMatrix& rho) {
  OutputDistribution dist;
  dist.factor_dims = rho.factor_dims().size() > 1 ? rho.factor_dims() : qubit_dims(rho.dim());
  dist.probs = rho.matrix().diagonal().real();
  clamp_and_check(dist.probs);
  return dist;
}

OutputDistribution marginal(const OutputDistribution& dist, const Partition& part,
                            const std::string& keep) {
  part.require_consistent_with(dist.dim());
  const auto keep_sites = part.sites_of(keep);
  std::vector<int> traced;
  for (int s = 0; s < part.n_sites(); ++s) {
    if (part.region_of_site(s) != keep) traced.push_back(s);
  }
  const auto keep_embed = embedding_table(part.factor_dims(), keep_sites);
  const auto trace_embed = embedding_table(part.factor_dims(), traced);

  OutputDistribution out;
  for (int s : keep_sites) out.factor_dims.push_back(part.factor_dims()[static_cast<size_t>(s)]);
  if (out.factor_dims.empty()) out.factor_dims.push_back(1);
  out.probs = RealVector::Zero(static_cast<Index>(keep_embed.size()));
  for (size_t ka = 0; ka < keep_embed.size(); ++ka) {
    double acc = 0.0;
    for (Index t : trace_embed) acc += dist.probs(keep_embed[ka] + t);
    out.probs(static_cast<Index>(ka)) = acc;
  }
  return out;
}

double tvd(const OutputDistribution& p, const OutputDistribution& q) {
  if (p.dim() != q.dim()) throw DimensionError("tvd: dimension mismatch");
  return (p.probs - q.probs).cwiseAbs().sum();
}

MomentEstimate pt_moment_ratio(const EnsembleSampler& sampler, const DensityMatrix& rho, Index x,
                               int k, std::int64_t n_samples, const McOptions& opts) {
  double p_rho = rho.matrix()(x, x).real();
  if (p_rho <= 1e-12) {
    throw ValidationError("pt_moment_ratio: p_rho(x) is too small for a relative moment");
  }
  double denom = static_cast<double>(factorial(k)) * std::pow(p_rho, k);
  BlockSums sums = mc_block_sums(
      n_samples, 3,
      [&](std::uint64_t i, double* out) {
        PureState psi = sampler.sample(i);
        double p = std::norm(psi.amplitudes(x));
        out[0] = psi.weight;
        out[1] = psi.weight * std::pow(p, k);
        out[2] = psi.weight * psi.weight;
      },
      opts);
  JackknifeEstimate est = jackknife_ratio(sums, 1, 0);
  MomentEstimate result;
  result.value = est.value / denom;
  result.std_error = est.std_error / denom;
  result.n_samples = n_samples;
  result.effective_samples = effective_sample_size(sums, 0, 2);
  result.weighted = sampler.weighted();
  result.low_quality = result.effective_samples < 30.0;
  return result;
}

CoherenceParam coherence_r(const DensityMatrix& rho, Index x, Index xp) {
  double p = rho.matrix()(x, x).real();
  double pp = rho.matrix()(xp, xp).real();
  if (p <= 1e-12 || pp <= 1e-12) {
    throw ValidationError("coherence_r: a diagonal entry is zero");
  }
  CoherenceParam c{rho.matrix()(x, xp) / std::sqrt(p * pp)};
  if (c.magnitude() > 1.0 + 1e-9) {
    throw std::runtime_error("coherence_r: |r| > 1 violates positivity");
  }
  return c;
}

namespace {
double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return b;
}
}  // namespace

double wishart_joint_moment_closed(const DensityMatrix& rho, Index x, Index xp, int a, int b,
                                   int c) {
  if (a < 0 || b < 0 || c < 0) throw ValidationError("wishart moment: negative exponent");
  if (2 * a + b + c > 6) throw ValidationError("wishart moment: 2a+b+c > 6 unsupported");
  double p = rho.matrix()(x, x).real();
  double pp = rho.matrix()(xp, xp).real();
  double r2 = std::norm(coherence_r(rho, x, xp).r);
  double sum = 0.0;
  for (int l = 0; l <= std::min(b + a, c + a); ++l) {
    sum += binomial(b + a, l) * binomial(c + a, l) * std::pow(r2, l);
  }
  return std::pow(p, b + a) * std::pow(pp, c + a) * static_cast<double>(factorial(b + a)) *
         static_cast<double>(factorial(c + a)) * sum;
}

MomentEstimate wishart_joint_moment_mc(const EnsembleSampler& sampler, Index x, Index xp, int a,
                                       int b, int c, std::int64_t n_samples,
                                       const McOptions& opts) {
  if (2 * a + b + c > 6) throw ValidationError("wishart moment: 2a+b+c > 6 unsupported");
  const int k = 2 * a + b + c;
  if (sampler.kind() != EnsembleKind::ScroogeDistortion && sampler.kind() != EnsembleKind::Haar) {
    throw ValidationError("wishart_joint_moment_mc: needs a Haar-weight-carrying sampler");
  }
  BlockSums sums = mc_block_sums(
      n_samples, 4,
      [&](std::uint64_t i, double* out) {
        PureState psi = sampler.sample(i);
        double w = std::pow(psi.weight, k);
        Complex off = psi.amplitudes(x) * std::conj(psi.amplitudes(xp));
        double f = std::pow(std::norm(off), a) * std::pow(std::norm(psi.amplitudes(x)), b) *
                   std::pow(std::norm(psi.amplitudes(xp)), c);
        out[0] = w * f;
        out[1] = 1.0;
        out[2] = w;
        out[3] = w * w;
      },
      opts);
  JackknifeEstimate est = jackknife_ratio(sums, 0, 1);
  const double prefactor = haar_prefactor(sampler.dim(), k);
  MomentEstimate result;
  result.value = est.value / prefactor;
  result.std_error = est.std_error / prefactor;
  result.n_samples = n_samples;
  result.effective_samples = effective_sample_size(sums, 2, 3);
  result.weighted = true;
  result.low_quality = result.effective_samples < 30.0;
  return result;
}

double collision_probability(const OutputDistribution& dist) { return dist.probs.squaredNorm(); }

namespace {

// sum_i sum_x p(x) p(x with bit i flipped), for qubit factor dims.
double bitflip_overlap(const RealVector& p, int n_bits) {
  double acc = 0.0;
  const Index d = p.size();
  for (int bit = 0; bit < n_bits; ++bit) {
    const Index mask = Index(1) << (n_bits - 1 - bit);
    for (Index x = 0; x < d; ++x) acc += p(x) * p(x ^ mask);
  }
  return acc;
}

int require_qubits(const std::vector<Index>& dims, const char* who) {
  for (Index d : dims) {
    if (d != 2) throw ValidationError(std::string(who) + ": only qubit factors supported");
  }
  return static_cast<int>(dims.size());
}

}  // namespace

MomentEstimate noise_sensitivity(const EnsembleSampler& sampler, std::int64_t n_samples,
                                 const McOptions& opts) {
  Index d = sampler.dim();
  int n_bits = 0;
  while ((Index(1) << n_bits) < d) ++n_bits;
  if ((Index(1) << n_bits) != d) {
    throw ValidationError("noise_sensitivity: sampler dimension is not a power of two");
  }
  BlockSums sums = mc_block_sums(
      n_samples, 3,
      [&](std::uint64_t i, double* out) {
        PureState psi = sampler.sample(i);
        RealVector p = psi.amplitudes.cwiseAbs2();
        out[0] = psi.weight;
        out[1] = psi.weight * bitflip_overlap(p, n_bits);
        out[2] = psi.weight * psi.weight;
      },
      opts);
  JackknifeEstimate est = jackknife_ratio(sums, 1, 0);
  MomentEstimate result;
  result.value = est.value;
  result.std_error = est.std_error;
  result.n_samples = n_samples;
  result.effective_samples = effective_sample_size(sums, 0, 2);
  result.weighted = sampler.weighted();
  result.low_quality = result.effective_samples < 30.0;
  return result;
}

DensityMatrix apply_depolarizing(const DensityMatrix& rho, double gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw ValidationError("apply_depolarizing: gamma in [0,1]");
  std::vector<Index> dims = rho.factor_dims();
  if (dims.size() == 1 && dims[0] > 2) {
    dims = qubit_dims(rho.dim());
  }
  int n = require_qubits(dims, "apply_depolarizing");
  Matrix current = rho.matrix();
  std::vector<std::string> labels(static_cast<size_t>(n));
  for (int site = 0; site < n; ++site) {
    for (int s = 0; s < n; ++s) labels[static_cast<size_t>(s)] = s == site ? "T" : "R";
    Partition part(std::vector<Index>(static_cast<size_t>(n), 2), labels);
    // tr_site (x) I/2, re-embedded at the same site
    Matrix reduced = partial_trace(current, part, "R");
    const auto rest_embed = embedding_table(part.factor_dims(), part.sites_of("R"));
    const auto site_embed = embedding_table(part.factor_dims(), part.sites_of("T"));
    Matrix mixed = Matrix::Zero(current.rows(), current.cols());
    for (size_t rr = 0; rr < rest_embed.size(); ++rr) {
      for (size_t rc = 0; rc < rest_embed.size(); ++rc) {
        for (size_t t = 0; t < site_embed.size(); ++t) {
          mixed(rest_embed[rr] + site_embed[t], rest_embed[rc] + site_embed[t]) =
              reduced(static_cast<Index>(rr), static_cast<Index>(rc)) * 0.5;
        }
      }
    }
    current = (1.0 - gamma) * current + gamma * mixed;
  }
  return DensityMatrix(std::move(current), std::vector<Index>(static_cast<size_t>(n), 2));
}

DensityMatrix apply_depolarizing(const PureState& psi, double gamma,
                                 std::vector<Index> factor_dims) {
  Matrix dyad = psi.amplitudes * psi.amplitudes.adjoint();
  std::vector<Index> dims = factor_dims.empty() ? qubit_dims(psi.dim()) : std::move(factor_dims);
  return apply_depolarizing(DensityMatrix(std::move(dyad), std::move(dims)), gamma);
}

OutputDistribution apply_depolarizing(const OutputDistribution& dist, double gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw ValidationError("apply_depolarizing: gamma in [0,1]");
  int n = require_qubits(dist.factor_dims, "apply_depolarizing");
  RealVector p = dist.probs;
  // Diagonal action of the channel: flip each bit with probability gamma/2.
  for (int bit = 0; bit < n; ++bit) {
    const Index mask = Index(1) << (n - 1 - bit);
    RealVector next(p.size());
    for (Index x = 0; x < p.size(); ++x) {
      next(x) = (1.0 - gamma / 2.0) * p(x) + (gamma / 2.0) * p(x ^ mask);
    }
    p = std::move(next);
  }
  OutputDistribution out;
  out.factor_dims = dist.factor_dims;
  out.probs = std::move(p);
  return out;
}

namespace {

double shannon_bits(const RealVector& p) {
  double h = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0) h -= p(i) * std::log2(p(i));
  }
  return h;
}

RealVector marginal_over(const OutputDistribution& dist, const Partition& part,
                         const std::vector<int>& keep_sites) {
  std::vector<int> traced;
  for (int s = 0; s < part.n_sites(); ++s) {
    if (std::find(keep_sites.begin(), keep_sites.end(), s) == keep_sites.end()) traced.push_back(s);
  }
  const auto keep_embed = embedding_table(part.factor_dims(), keep_sites);
  const auto trace_embed = embedding_table(part.factor_dims(), traced);
  RealVector out = RealVector::Zero(static_cast<Index>(keep_embed.size()));
  for (size_t ka = 0; ka < keep_embed.size(); ++ka) {
    double acc = 0.0;
    for (Index t : trace_embed) acc += dist.probs(keep_embed[ka] + t);
    out(static_cast<Index>(ka)) = acc;
  }
  return out;
}

}  // namespace

double cmi(const OutputDistribution& dist, const Partition& part, const std::string& a_label,
           const std::string& b_label, const std::string& c_label) {
  part.require_consistent_with(dist.dim());
  auto a_sites = part.sites_of(a_label);
  auto b_sites = part.sites_of(b_label);
  auto c_sites = part.sites_of(c_label);
  if (a_sites.size() + b_sites.size() + c_sites.size() !=
      static_cast<size_t>(part.n_sites())) {
    throw ValidationError("cmi: regions A, B, C must cover all sites");
  }
  auto join = [](std::vector<int> u, const std::vector<int>& v) {
    u.insert(u.end(), v.begin(), v.end());
    std::sort(u.begin(), u.end());
    return u;
  };
  double h_ab = shannon_bits(marginal_over(dist, part, join(a_sites, b_sites)));
  double h_bc = shannon_bits(marginal_over(dist, part, join(b_sites, c_sites)));
  double h_b = b_sites.empty() ? 0.0 : shannon_bits(marginal_over(dist, part, b_sites));
  double h_abc = shannon_bits(dist.probs);
  double value = h_ab + h_bc - h_b - h_abc;
  if (value < -1e-9) {
    std::ostringstream msg;
    msg << "cmi: negative value " << value;
    throw std::runtime_error(msg.str());
  }
  return std::max(0.0, value);
}

double quantized_cmi_target(const DensityMatrix& rho, const Partition& part) {
  Matrix rho_a = partial_trace(rho.matrix(), part, "A");
  Matrix rho_c = partial_trace(rho.matrix(), part, "C");
  // AC marginal: trace out B only.
  std::vector<std::string> labels(static_cast<size_t>(part.n_sites()));
  for (int s = 0; s < part.n_sites(); ++s) {
    labels[static_cast<size_t>(s)] = part.region_of_site(s) == "B" ? "B" : "AC";
  }
  Partition ac_view(part.factor_dims(), labels);
  Matrix rho_ac = partial_trace(rho.matrix(), ac_view, "AC");
  double qa = subentropy(DensityMatrix(std::move(rho_a)));
  double qc = subentropy(DensityMatrix(std::move(rho_c)));
  double qac = subentropy(DensityMatrix(std::move(rho_ac)));
  return qa + qc - qac;
}

MomentEstimate avg_cmi_scrooge(const DensityMatrix& rho, const Partition& part,
                               std::int64_t n_samples, std::uint64_t seed, const McOptions& opts) {
  part.require_consistent_with(rho.dim());
  // Theorem hypothesis: rho must factorize across the tripartition.
  Matrix rho_a = partial_trace(rho.matrix(), part, "A");
  Matrix rho_b = partial_trace(rho.matrix(), part, "B");
  Matrix rho_c = partial_trace(rho.matrix(), part, "C");
  DensityMatrix product = make_product(
      {DensityMatrix(rho_a, {rho_a.rows()}), DensityMatrix(rho_b, {rho_b.rows()}),
       DensityMatrix(rho_c, {rho_c.rows()})});
  // The product reconstruction above assumes A, B, C sites are contiguous in
  // that order; verify entrywise either way.
  std::vector<int> order;
  for (const std::string& label : {std::string("A"), std::string("B"), std::string("C")}) {
    auto sites = part.sites_of(label);
    order.insert(order.end(), sites.begin(), sites.end());
  }
  bool contiguous = std::is_sorted(order.begin(), order.end());
  if (!contiguous) {
    throw ValidationError("avg_cmi_scrooge: regions must appear in site order A,B,C");
  }
  double max_diff = (product.matrix() - rho.matrix()).cwiseAbs().maxCoeff();
  if (max_diff > 1e-10) {
    std::ostringstream msg;
    msg << "avg_cmi_scrooge: rho is not a product across A|B|C (max deviation " << max_diff
        << ")";
    throw ValidationError(msg.str());
  }

  EnsembleSampler sampler = EnsembleSampler::scrooge_distortion(rho, seed);
  BlockSums sums = mc_block_sums(
      n_samples, 3,
      [&](std::uint64_t i, double* out) {
        PureState psi = sampler.sample(i);
        OutputDistribution dist;
        dist.factor_dims = part.factor_dims();
        dist.probs = psi.amplitudes.cwiseAbs2();
        double value = cmi(dist, part);
        out[0] = psi.weight;
        out[1] = psi.weight * value;
        out[2] = psi.weight * psi.weight;
      },
      opts);
  JackknifeEstimate est = jackknife_ratio(sums, 1, 0);
  MomentEstimate result;
  result.value = est.value;
  result.std_error = est.std_error;
  result.n_samples = n_samples;
  result.effective_samples = effective_sample_size(sums, 0, 2);
  result.weighted = true;
  result.low_quality = result.effective_samples < 30.0;
  return result;
}

}  // namespace scrooge
