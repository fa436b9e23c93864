#include "scrooge/ensembles.hpp"

#include "scrooge/linalg.hpp"
#include "scrooge/qdm_io.hpp"

#include <Eigen/QR>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace scrooge {

namespace {

Vector gaussian_vector(CounterRng& rng, Index dim) {
  Vector z(dim);
  for (Index i = 0; i < dim; ++i) z(i) = rng.complex_normal();
  return z;
}

Vector haar_vector(CounterRng& rng, Index dim) {
  Vector z = gaussian_vector(rng, dim);
  double norm = z.norm();
  while (norm < 1e-150) {  // never in practice
    z = gaussian_vector(rng, dim);
    norm = z.norm();
  }
  return z / norm;
}

// Haar unitary via QR of a Ginibre matrix with the Mezzadri phase fix.
Matrix haar_unitary(CounterRng& rng, Index dim) {
  Matrix g(dim, dim);
  for (Index c = 0; c < dim; ++c) {
    for (Index r = 0; r < dim; ++r) g(r, c) = rng.complex_normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index c = 0; c < dim; ++c) {
    Complex diag = r(c, c);
    Complex phase = std::abs(diag) > 0 ? diag / std::abs(diag) : Complex(1.0, 0.0);
    q.col(c) *= phase;
  }
  return q;
}

}  // namespace

Vector sample_haar_vector(Index dim, std::uint64_t master_seed, std::uint64_t index) {
  if (dim < 1) throw DimensionError("sample_haar_vector: dim must be >= 1");
  if (dim > kMaxVectorDim) throw DimensionError("sample_haar_vector: dim exceeds vector limit");
  CounterRng rng(master_seed, rng_stream::kSampler, index);
  return haar_vector(rng, dim);
}

Vector sample_gaussian_vector(Index dim, std::uint64_t master_seed, std::uint64_t index) {
  if (dim < 1) throw DimensionError("sample_gaussian_vector: dim must be >= 1");
  if (dim > kMaxVectorDim) throw DimensionError("sample_gaussian_vector: dim exceeds vector limit");
  CounterRng rng(master_seed, rng_stream::kSampler, index);
  return gaussian_vector(rng, dim);
}

EnsembleSampler EnsembleSampler::haar(Index dim, std::uint64_t master_seed) {
  if (dim < 1) throw DimensionError("EnsembleSampler::haar: dim must be >= 1");
  EnsembleSampler s;
  s.kind_ = EnsembleKind::Haar;
  s.dim_ = dim;
  s.master_seed_ = master_seed;
  s.degenerate_draws_ = std::make_shared<std::atomic<std::uint64_t>>(0);
  return s;
}

EnsembleSampler EnsembleSampler::scrooge_distortion(DensityMatrix rho, std::uint64_t master_seed) {
  EnsembleSampler s;
  s.kind_ = EnsembleKind::ScroogeDistortion;
  s.dim_ = rho.dim();
  s.master_seed_ = master_seed;
  double off_diag = 0.0;
  for (Index c = 0; c < rho.dim(); ++c) {
    for (Index r = 0; r < rho.dim(); ++r) {
      if (r != c) off_diag = std::max(off_diag, std::abs(rho.matrix()(r, c)));
    }
  }
  if (off_diag < 1e-15) {
    s.diagonal_rho_ = true;
    s.sqrt_diag_ = rho.matrix().diagonal().real().cwiseMax(0.0).cwiseSqrt();
  } else {
    s.sqrt_rho_ = sqrt_psd(rho);
  }
  s.rho_ = std::move(rho);
  s.degenerate_draws_ = std::make_shared<std::atomic<std::uint64_t>>(0);
  return s;
}

EnsembleSampler EnsembleSampler::scrooge_purification(DensityMatrix rho, std::uint64_t master_seed) {
  EnsembleSampler s;
  s.kind_ = EnsembleKind::ScroogePurification;
  s.dim_ = rho.dim();
  s.master_seed_ = master_seed;
  const EigResult& decomposition = rho.eig();
  const Index rank = rho.rank();
  s.support_eigenvalues_ = RealVector(rank);
  s.support_eigenvectors_ = Matrix(rho.dim(), rank);
  Index j = 0;
  for (Index i = 0; i < rho.dim(); ++i) {
    // ascending order: support is the top `rank` eigenvalues
    if (decomposition.values(i) > kEigenvalueTol * decomposition.values(rho.dim() - 1)) {
      s.support_eigenvalues_(j) = decomposition.values(i);
      s.support_eigenvectors_.col(j) = decomposition.vectors.col(i);
      ++j;
    }
  }
  s.support_eigenvalues_.conservativeResize(j);
  s.support_eigenvectors_.conservativeResize(Eigen::NoChange, j);
  // Renormalize the retained spectrum so outcome probabilities sum to one.
  s.support_eigenvalues_ /= s.support_eigenvalues_.sum();
  s.rho_ = std::move(rho);
  s.degenerate_draws_ = std::make_shared<std::atomic<std::uint64_t>>(0);
  return s;
}

EnsembleSampler EnsembleSampler::temporal(Hamiltonian h, Vector psi0, double horizon,
                                          std::uint64_t master_seed) {
  if (h.matrix.rows() != psi0.size()) {
    throw DimensionError("EnsembleSampler::temporal: Hamiltonian and state dims differ");
  }
  if (!is_hermitian(h.matrix, 1e-9 * std::max(1.0, h.matrix.cwiseAbs().maxCoeff()))) {
    throw ValidationError("EnsembleSampler::temporal: Hamiltonian is not Hermitian");
  }
  if (std::abs(psi0.norm() - 1.0) > 1e-9) {
    throw ValidationError("EnsembleSampler::temporal: psi0 is not normalized");
  }
  if (horizon < 0) throw ValidationError("EnsembleSampler::temporal: horizon must be >= 0");
  EnsembleSampler s;
  s.kind_ = EnsembleKind::Temporal;
  s.dim_ = psi0.size();
  s.master_seed_ = master_seed;
  auto decomposition = cached_eigs(h.matrix);
  s.energies_ = decomposition->values;
  s.energy_basis_ = decomposition->vectors;
  s.psi0_in_basis_ = s.energy_basis_.adjoint() * psi0;
  s.horizon_ = horizon;
  s.degenerate_draws_ = std::make_shared<std::atomic<std::uint64_t>>(0);
  return s;
}

PureState EnsembleSampler::sample(std::uint64_t index) const {
  CounterRng rng(master_seed_, rng_stream::kSampler, index);
  switch (kind_) {
    case EnsembleKind::Haar:
      return {haar_vector(rng, dim_), 1.0};

    case EnsembleKind::ScroogeDistortion: {
      // state = sqrt(rho)|phi> / ||.||, weight = r_phi = d <phi|rho|phi>.
      for (;;) {
        Vector phi = haar_vector(rng, dim_);
        Vector distorted =
            diagonal_rho_ ? Vector(sqrt_diag_.cast<Complex>().cwiseProduct(phi)) : Vector(sqrt_rho_ * phi);
        double norm = distorted.norm();
        if (norm >= 1e-14) {
          double weight = static_cast<double>(dim_) * norm * norm;
          return {distorted / norm, weight};
        }
        // Measure-zero: |phi> fell in the kernel of rho. Keep consuming this
        // sample's private stream so determinism in `index` is preserved.
        degenerate_draws_->fetch_add(1, std::memory_order_relaxed);
      }
    }

    case EnsembleKind::ScroogePurification: {
      // Haar-random rank-1 measurement on a purifying system of dimension
      // rank(rho): outcome m has probability sum_j lambda_j |U_jm|^2 and
      // leaves sum_j sqrt(lambda_j) conj(U_jm) |e_j> on the primary system.
      const Index r = support_eigenvalues_.size();
      Matrix u = haar_unitary(rng, r);
      RealVector outcome_probs(r);
      for (Index m = 0; m < r; ++m) {
        double p = 0.0;
        for (Index j = 0; j < r; ++j) p += support_eigenvalues_(j) * std::norm(u(j, m));
        outcome_probs(m) = p;
      }
      double pick = rng.uniform() * outcome_probs.sum();
      Index m = 0;
      double acc = 0.0;
      for (; m < r; ++m) {
        acc += outcome_probs(m);
        if (pick < acc) break;
      }
      if (m == r) m = r - 1;
      Vector coeffs(r);
      for (Index j = 0; j < r; ++j) {
        coeffs(j) = std::sqrt(support_eigenvalues_(j)) * std::conj(u(j, m));
      }
      Vector state = support_eigenvectors_ * coeffs;
      return {state / state.norm(), 1.0};
    }

    case EnsembleKind::Temporal: {
      double t = horizon_ > 0 ? rng.uniform() * horizon_ : 0.0;
      Vector phases(dim_);
      for (Index i = 0; i < dim_; ++i) {
        phases(i) = std::exp(Complex(0.0, -energies_(i) * t)) * psi0_in_basis_(i);
      }
      return {energy_basis_ * phases, 1.0};
    }

    case EnsembleKind::GaussianVector:
      return {gaussian_vector(rng, dim_), 1.0};
  }
  throw std::logic_error("EnsembleSampler: unknown kind");
}

double EnsembleSampler::weight_at(std::uint64_t index) const {
  if (!weighted()) return 1.0;
  return sample(index).weight;
}

// --- factories --------------------------------------------------------------

DensityMatrix make_flat_rank(Index d, Index m) {
  if (m < 1 || m > d) throw DimensionError("make_flat_rank: need 1 <= m <= d");
  Matrix rho = Matrix::Zero(d, d);
  for (Index i = 0; i < m; ++i) rho(i, i) = 1.0 / static_cast<double>(m);
  return DensityMatrix(std::move(rho));
}

DensityMatrix make_thermal(const Hamiltonian& h, double beta) {
  if (beta < 0) throw ValidationError("make_thermal: beta must be >= 0");
  auto decomposition = cached_eigs(h.matrix);
  const Index d = h.matrix.rows();
  // Shift by the ground energy so the exponentials stay in range.
  double e0 = decomposition->values(0);
  RealVector boltzmann(d);
  for (Index i = 0; i < d; ++i) boltzmann(i) = std::exp(-beta * (decomposition->values(i) - e0));
  boltzmann /= boltzmann.sum();
  Matrix rho = decomposition->vectors * boltzmann.asDiagonal() * decomposition->vectors.adjoint();
  return DensityMatrix((rho + rho.adjoint()) / 2.0);
}

DensityMatrix make_random_rank(Index d, Index m, std::uint64_t seed) {
  if (m < 1 || m > d) throw DimensionError("make_random_rank: need 1 <= m <= d");
  CounterRng rng(seed, rng_stream::kStateFactory, 0);
  Matrix g(d, m);
  for (Index c = 0; c < m; ++c) {
    for (Index r = 0; r < d; ++r) g(r, c) = rng.complex_normal();
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix((rho + rho.adjoint()) / 2.0);
}

DensityMatrix make_product(const std::vector<DensityMatrix>& factors) {
  if (factors.empty()) throw DimensionError("make_product: no factors");
  Matrix acc = factors[0].matrix();
  std::vector<Index> dims = factors[0].factor_dims();
  for (size_t i = 1; i < factors.size(); ++i) {
    const Matrix& b = factors[i].matrix();
    Matrix next(acc.rows() * b.rows(), acc.cols() * b.cols());
    for (Index r = 0; r < acc.rows(); ++r) {
      for (Index c = 0; c < acc.cols(); ++c) {
        next.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = acc(r, c) * b;
      }
    }
    acc = std::move(next);
    dims.insert(dims.end(), factors[i].factor_dims().begin(), factors[i].factor_dims().end());
  }
  return DensityMatrix(std::move(acc), std::move(dims));
}

DensityMatrix make_pure_basis(Index d, Index x) {
  if (x < 0 || x >= d) throw DimensionError("make_pure_basis: index out of range");
  Matrix rho = Matrix::Zero(d, d);
  rho(x, x) = 1.0;
  return DensityMatrix(std::move(rho));
}

namespace {

std::vector<std::string> split_top_level(const std::string& s, char sep) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == sep && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  return parts;
}

long to_long(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("rho spec: bad " + what + " '" + s + "'");
  }
}

double to_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("rho spec: bad " + what + " '" + s + "'");
  }
}

}  // namespace

DensityMatrix parse_rho_spec(const std::string& spec) {
  if (spec.rfind("product(", 0) == 0 && spec.back() == ')') {
    std::string inner = spec.substr(8, spec.size() - 9);
    std::vector<DensityMatrix> factors;
    for (const std::string& part : split_top_level(inner, ',')) {
      factors.push_back(parse_rho_spec(part));
    }
    return make_product(factors);
  }
  auto fields = split_top_level(spec, ':');
  const std::string& kind = fields[0];
  if (kind == "flat" && fields.size() == 3) {
    return make_flat_rank(to_long(fields[1], "dim"), to_long(fields[2], "rank"));
  }
  if (kind == "random" && fields.size() == 4) {
    return make_random_rank(to_long(fields[1], "dim"), to_long(fields[2], "rank"),
                            static_cast<std::uint64_t>(to_long(fields[3], "seed")));
  }
  if (kind == "pure" && fields.size() == 3) {
    return make_pure_basis(to_long(fields[1], "dim"), to_long(fields[2], "basis index"));
  }
  if (kind == "thermal" && fields.size() == 5 && fields[1] == "gue") {
    Index d = to_long(fields[2], "dim");
    auto h = make_gue_hamiltonian(d, static_cast<std::uint64_t>(to_long(fields[3], "seed")),
                                  static_cast<double>(d));
    return make_thermal(h, to_double(fields[4], "beta"));
  }
  if (kind == "file" && fields.size() >= 2) {
    return load_qdm(spec.substr(5));
  }
  throw ValidationError("rho spec: unrecognized '" + spec + "'");
}

Hamiltonian make_gue_hamiltonian(Index d, std::uint64_t seed, double target_norm) {
  if (d < 2) throw DimensionError("make_gue_hamiltonian: d must be >= 2");
  CounterRng rng(seed, rng_stream::kStateFactory, 1);
  Matrix g(d, d);
  for (Index c = 0; c < d; ++c) {
    for (Index r = 0; r < d; ++r) g(r, c) = rng.complex_normal();
  }
  Matrix h = (g + g.adjoint()) / 2.0;
  double norm = spectral_norm(h);
  h *= target_norm / norm;
  return {std::move(h), target_norm};
}

Hamiltonian make_local_random_hamiltonian(int n_qubits, std::uint64_t seed, double target_norm) {
  if (n_qubits < 2) throw DimensionError("make_local_random_hamiltonian: need >= 2 qubits");
  const Index d = Index(1) << n_qubits;
  if (d > kMaxMatrixDim) throw DimensionError("make_local_random_hamiltonian: too many qubits");
  CounterRng rng(seed, rng_stream::kStateFactory, 2);
  Matrix h = Matrix::Zero(d, d);
  for (int site = 0; site + 1 < n_qubits; ++site) {
    Matrix g(4, 4);
    for (Index c = 0; c < 4; ++c) {
      for (Index r = 0; r < 4; ++r) g(r, c) = rng.complex_normal();
    }
    Matrix term2 = (g + g.adjoint()) / 2.0;
    // Embed the two-site term at (site, site+1): identity on all other qubits.
    const Index left = Index(1) << site;
    const Index right = Index(1) << (n_qubits - site - 2);
    for (Index l = 0; l < left; ++l) {
      for (Index a = 0; a < 4; ++a) {
        for (Index b = 0; b < 4; ++b) {
          for (Index r = 0; r < right; ++r) {
            Index row = (l * 4 + a) * right + r;
            Index col = (l * 4 + b) * right + r;
            h(row, col) += term2(a, b);
          }
        }
      }
    }
  }
  double norm = spectral_norm(h);
  h *= target_norm / norm;
  return {std::move(h), target_norm};
}

// --- eigendecomposition cache -----------------------------------------------

namespace {

std::uint64_t matrix_hash(const Matrix& m) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ull;
  };
  mix(static_cast<std::uint64_t>(m.rows()));
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      std::uint64_t bits;
      double re = m(r, c).real(), im = m(r, c).imag();
      std::memcpy(&bits, &re, 8);
      mix(bits);
      std::memcpy(&bits, &im, 8);
      mix(bits);
    }
  }
  return h;
}

std::mutex g_eig_cache_mutex;
std::unordered_map<std::uint64_t, std::shared_ptr<const EigResult>>& eig_cache() {
  static std::unordered_map<std::uint64_t, std::shared_ptr<const EigResult>> cache;
  return cache;
}

}  // namespace

std::shared_ptr<const EigResult> cached_eigs(const Matrix& hermitian) {
  std::uint64_t key = matrix_hash(hermitian);
  {
    std::lock_guard<std::mutex> lock(g_eig_cache_mutex);
    auto it = eig_cache().find(key);
    if (it != eig_cache().end()) return it->second;
  }
  auto result = std::make_shared<const EigResult>(eigs(hermitian));
  std::lock_guard<std::mutex> lock(g_eig_cache_mutex);
  auto [it, inserted] = eig_cache().emplace(key, std::move(result));
  return it->second;
}

std::size_t eig_cache_size() {
  std::lock_guard<std::mutex> lock(g_eig_cache_mutex);
  return eig_cache().size();
}

}  // namespace scrooge
